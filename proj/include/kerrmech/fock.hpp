#pragma once

// Operators and states on a truncated two-mode Fock space. The composite
// basis index is n * max(1, n_b) + m for optical level n and mechanical
// level m; the Kerr system uses n_b = 0 (optical mode only).

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "kerrmech/params.hpp"

namespace kerrmech {

using cplx = std::complex<double>;
using SparseMatrix = Eigen::SparseMatrix<cplx>;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct FockConfig {
  int n_a = 2;  ///< optical levels 0..n_a-1
  int n_b = 0;  ///< mechanical levels; 0 means no mechanical mode

  int mech_dim() const { return n_b > 0 ? n_b : 1; }
  int dim() const { return n_a * mech_dim(); }
  /// Size of the vectorized density matrix.
  long long liouville_dim() const { return static_cast<long long>(dim()) * dim(); }
  int index(int n, int m = 0) const { return n * mech_dim() + m; }
  void validate() const;

  friend bool operator==(const FockConfig&, const FockConfig&) = default;
};

std::string to_string(const FockConfig& c);

enum class Mode { Optical, Mechanical };

class FockOperator {
 public:
  FockOperator(FockConfig dims, SparseMatrix m);

  static FockOperator identity(FockConfig dims);
  static FockOperator zero(FockConfig dims);

  const FockConfig& dims() const { return dims_; }
  const SparseMatrix& matrix() const { return m_; }
  Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(m_); }

  FockOperator adjoint() const;
  /// max |O - O^+|.
  double hermiticity_error() const;
  bool is_hermitian(double tol = 1e-12) const { return hermiticity_error() <= tol; }
  cplx element(int row, int col) const { return m_.coeff(row, col); }

  FockOperator& operator+=(const FockOperator& o);
  FockOperator& operator-=(const FockOperator& o);
  FockOperator& operator*=(cplx s);

  friend FockOperator operator+(FockOperator a, const FockOperator& b) { return a += b; }
  friend FockOperator operator-(FockOperator a, const FockOperator& b) { return a -= b; }
  friend FockOperator operator*(const FockOperator& a, const FockOperator& b);
  friend FockOperator operator*(cplx s, FockOperator a) { return a *= s; }
  friend FockOperator operator*(FockOperator a, cplx s) { return a *= s; }

 private:
  FockConfig dims_;
  SparseMatrix m_;
};

/// Commutator [a, b].
FockOperator commutator(const FockOperator& a, const FockOperator& b);

/// Annihilation operator of one mode, identity on the other.
FockOperator ladder_op(const FockConfig& dims, Mode mode);
FockOperator number_op(const FockConfig& dims, Mode mode);

/// H = omega_m b^+b - delta0 a^+a - g0 a^+a (b + b^+) + i eps (a - a^+).
FockOperator build_hamiltonian_om(const PhysicalParams& p, const FockConfig& dims);
/// H = -delta0 a^+a - (g0^2/omega_m) (a^+a)^2 + i eps (a - a^+). Requires n_b = 0.
FockOperator build_hamiltonian_kerr(const PhysicalParams& p, const FockConfig& dims);

/// Largest |<n,m| U H0 U^+ - (H_K + omega_m b^+b) |n',m'>| on the window
/// n, n' < n_a/2 and m, m' < n_b/2, with U = exp[(g0/omega_m)(b - b^+) a^+a]
/// and H0 the undriven optomechanical Hamiltonian. The drive is ignored.
double polaron_check(const PhysicalParams& p, const FockConfig& dims);

/// Same, restricted to a caller-chosen window (n < n_window, m < m_window).
double polaron_check(const PhysicalParams& p, const FockConfig& dims, int n_window,
                     int m_window);

/// A Hermitian, unit-trace, positive semidefinite state (within tolerance).
class DensityMatrix {
 public:
  /// Validates trace, Hermiticity and positivity; throws DimensionError on
  /// shape mismatch and std::domain_error on invariant violations.
  DensityMatrix(FockConfig dims, Eigen::MatrixXcd m);

  /// Skips validation; used where the invariants hold by construction.
  static DensityMatrix trusted(FockConfig dims, Eigen::MatrixXcd m);

  const FockConfig& dims() const { return dims_; }
  const Eigen::MatrixXcd& matrix() const { return m_; }
  cplx trace() const { return m_.trace(); }
  double min_eigenvalue() const;

 private:
  DensityMatrix() = default;
  FockConfig dims_;
  Eigen::MatrixXcd m_;
};

inline constexpr double kTraceTol = 1e-9;
inline constexpr double kHermitianTol = 1e-9;
inline constexpr double kPsdTol = 1e-8;

/// (m + m^+)/2, negative eigenvalues clipped to zero, trace renormalized.
Eigen::MatrixXcd hermitize_and_clip(const Eigen::MatrixXcd& m, double* min_eigenvalue = nullptr);

}  // namespace kerrmech
