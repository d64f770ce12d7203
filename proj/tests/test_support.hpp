#pragma once

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>

#include "kerrmech/fock.hpp"
#include "kerrmech/params.hpp"
#include "kerrmech/semiclassical.hpp"

namespace testing {

using cplx = std::complex<double>;

// Parameters of the T = 0 bistability figure: y = 1.5, chi = 0.08,
// omega_m/kappa = 30, Q_m = 300.
inline kerrmech::PhysicalParams bistable_params(double z, double n_th = 0.0) {
  return kerrmech::from_dimensionless({0.08, 1.5, z, 30.0, 300.0}, n_th);
}

// Random full-rank state G G^+ / Tr.
inline Eigen::MatrixXcd random_rho(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXcd g(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) g(i, j) = cplx(n(rng), n(rng));
  }
  Eigen::MatrixXcd r = g * g.adjoint();
  return r / r.trace().real();
}

inline Eigen::MatrixXcd random_matrix(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXcd g(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) g(i, j) = cplx(n(rng), n(rng));
  }
  return g;
}

inline bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

// Discriminant of 4 l^3 - 4 y l^2 + (y^2 + 1/4) l - z; positive for three
// real roots.
inline long double cubic_discriminant(double y, double z) {
  const long double a = 4.0L, b = -4.0L * y, c = static_cast<long double>(y) * y + 0.25L, d = -z;
  return 18 * a * b * c * d - 4 * b * b * b * d + b * b * c * c - 4 * a * c * c * c - 27 * a * a * d * d;
}

// |[i(D0' + K) - kappa/2] a + 2iK|a|^2 a - eps| / eps for the Kerr medium with
// D0' = D0 - K, K = g0^2/omega_m, evaluated at an optomechanical branch.
inline double kerr_mfe_residual(const kerrmech::PhysicalParams& p, const kerrmech::MeanFieldBranch& b) {
  const double k = p.kerr_shift();
  const double d0 = p.delta0 - k;
  const cplx a = b.a_bar;
  const cplx lhs = cplx(-p.kappa / 2.0, d0 + k) * a + cplx(0.0, 2.0 * k * std::norm(a)) * a - p.eps;
  return std::abs(lhs) / p.eps;
}

// Smallest real part of the drift-matrix spectrum.
inline double min_real_eigenvalue(const kerrmech::MeanFieldBranch& b, const kerrmech::PhysicalParams& p) {
  return kerrmech::drift_matrix(b, p).eigenvalues().real().minCoeff();
}

}  // namespace testing
