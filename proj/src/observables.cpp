#include "kerrmech/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "kerrmech/parallel.hpp"

namespace kerrmech {

namespace {

void require_same_dims(const FockConfig& a, const FockConfig& b, const char* what) {
  if (!(a == b)) throw DimensionError(std::string(what) + ": " + to_string(a) + " vs " + to_string(b));
}

void require_single_mode(const FockConfig& d, const char* what) {
  if (d.n_b != 0) throw DimensionError(std::string(what) + ": expected an optical-only state");
}

Eigen::MatrixXcd hermitian_sqrt(const Eigen::MatrixXcd& m, const char* name) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m + m.adjoint()));
  if (es.info() != Eigen::Success) throw std::runtime_error("fidelity: eigendecomposition failed");
  const Eigen::VectorXd& ev = es.eigenvalues();
  if (ev.size() > 0 && ev.minCoeff() < -kPsdTol) {
    std::ostringstream os;
    os << "fidelity: " << name << " has eigenvalue " << ev.minCoeff() << " below -" << kPsdTol;
    throw std::domain_error(os.str());
  }
  const Eigen::VectorXd root = ev.cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
}

// Diagonal moments sum_n w(n) P(n) of the optical photon number.
template <typename F>
double optical_moment(const DensityMatrix& rho, F w) {
  const FockConfig& d = rho.dims();
  double s = 0.0;
  for (int n = 0; n < d.n_a; ++n) {
    for (int m = 0; m < d.mech_dim(); ++m) {
      const int i = d.index(n, m);
      s += w(n) * rho.matrix()(i, i).real();
    }
  }
  return s;
}

// One Wigner value from the Laguerre closed form of the displaced-parity
// series:
//   W = (2/pi) sum_{k, n} (-1)^n rho_{n+k,n} (2 alpha^*)^k sqrt(n!/(n+k)!)
//       e^{-2|alpha|^2} L_n^(k)(4|alpha|^2)   (+ conjugate terms for k > 0),
// using phi_n = sqrt(n!/(n+k)!) x^{k/2} e^{-x/2} L_n^(k)(x), which obeys
//   phi_{n+1} = [(2n+1+k-x) phi_n - sqrt(n(n+k)) phi_{n-1}] / sqrt((n+1)(n+k+1)).
double wigner_point(const Eigen::MatrixXcd& rho, cplx alpha) {
  const int d = static_cast<int>(rho.rows());
  const double x = 4.0 * std::norm(alpha);
  const double theta = std::arg(alpha);
  const double log_x = x > 0.0 ? std::log(x) : 0.0;
  double w = 0.0;
  for (int k = 0; k < d; ++k) {
    double phi_prev = 0.0;
    double phi;
    if (x == 0.0) {
      phi = k == 0 ? 1.0 : 0.0;
    } else {
      phi = std::exp(0.5 * k * log_x - 0.5 * x - 0.5 * std::lgamma(k + 1.0));
    }
    cplx acc = 0.0;
    for (int n = 0; n + k < d; ++n) {
      acc += ((n % 2 == 0) ? 1.0 : -1.0) * phi * rho(n + k, n);
      const double next = ((2.0 * n + 1.0 + k - x) * phi - std::sqrt(double(n) * (n + k)) * phi_prev) /
                          std::sqrt((n + 1.0) * (n + k + 1.0));
      phi_prev = phi;
      phi = next;
    }
    if (k == 0) {
      w += acc.real();
    } else {
      w += 2.0 * (std::polar(1.0, -k * theta) * acc).real();
    }
  }
  return 2.0 / std::numbers::pi * w;
}

std::vector<double> axis(double lo, double hi, int n) {
  std::vector<double> a(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) a[i] = lo + (hi - lo) * i / (n - 1);
  return a;
}

}  // namespace

cplx expect(const DensityMatrix& rho, const FockOperator& op) {
  require_same_dims(rho.dims(), op.dims(), "expect");
  // Tr[rho O] = sum_ij rho_ji O_ij.
  cplx s = 0.0;
  const SparseMatrix& o = op.matrix();
  for (int j = 0; j < o.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(o, j); it; ++it) s += rho.matrix()(j, it.row()) * it.value();
  }
  return s;
}

std::optional<double> g2_zero(const DensityMatrix& rho) {
  const double n = optical_moment(rho, [](int k) { return double(k); });
  if (!(n > 1e-9)) return std::nullopt;
  const double nn = optical_moment(rho, [](int k) { return double(k) * (k - 1); });
  return nn / (n * n);
}

DensityMatrix partial_trace_optical(const DensityMatrix& rho) {
  const FockConfig& d = rho.dims();
  if (d.n_b < 1) throw DimensionError("partial_trace_optical: state has no mechanical mode");
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d.n_a, d.n_a);
  for (int n = 0; n < d.n_a; ++n) {
    for (int k = 0; k < d.n_a; ++k) {
      cplx s = 0.0;
      for (int m = 0; m < d.n_b; ++m) s += rho.matrix()(d.index(n, m), d.index(k, m));
      out(n, k) = s;
    }
  }
  return DensityMatrix::trusted(FockConfig{d.n_a, 0}, std::move(out));
}

double fidelity(const DensityMatrix& rho1, const DensityMatrix& rho2) {
  require_same_dims(rho1.dims(), rho2.dims(), "fidelity");
  const Eigen::MatrixXcd s1 = hermitian_sqrt(rho1.matrix(), "first state");
  hermitian_sqrt(rho2.matrix(), "second state");  // positivity check only
  const Eigen::MatrixXcd m = s1 * rho2.matrix() * s1;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m + m.adjoint()),
                                                           Eigen::EigenvaluesOnly);
  const double f = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return std::clamp(f, 0.0, 1.0);
}

DensityMatrix fock_state(int levels, int n) {
  if (n < 0 || n >= levels) throw DimensionError("fock_state: level outside truncation");
  const FockConfig d{levels, 0};
  d.validate();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(levels, levels);
  m(n, n) = 1.0;
  return DensityMatrix::trusted(d, std::move(m));
}

DensityMatrix coherent_state(int levels, cplx alpha) {
  const FockConfig d{levels, 0};
  d.validate();
  Eigen::VectorXcd c(levels);
  c(0) = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < levels; ++n) c(n) = c(n - 1) * alpha / std::sqrt(double(n));
  c.normalize();
  return DensityMatrix::trusted(d, c * c.adjoint());
}

DensityMatrix thermal_state(int levels, double mean_occupation) {
  if (!(mean_occupation >= 0.0) || !std::isfinite(mean_occupation)) {
    throw std::invalid_argument("thermal_state: occupation must be finite and >= 0");
  }
  const FockConfig d{levels, 0};
  d.validate();
  Eigen::VectorXd p = Eigen::VectorXd::Zero(levels);
  const double q = mean_occupation / (mean_occupation + 1.0);
  p(0) = 1.0;
  for (int n = 1; n < levels; ++n) p(n) = p(n - 1) * q;
  p /= p.sum();
  return DensityMatrix::trusted(d, p.cast<cplx>().asDiagonal().toDenseMatrix());
}

DensityMatrix product_state(const DensityMatrix& optical, const DensityMatrix& mechanical) {
  require_single_mode(optical.dims(), "product_state");
  require_single_mode(mechanical.dims(), "product_state");
  const FockConfig d{optical.dims().n_a, mechanical.dims().n_a};
  Eigen::MatrixXcd m(d.dim(), d.dim());
  const auto& a = optical.matrix();
  const auto& b = mechanical.matrix();
  for (int n = 0; n < d.n_a; ++n) {
    for (int k = 0; k < d.n_a; ++k) m.block(d.index(n), d.index(k), d.n_b, d.n_b) = a(n, k) * b;
  }
  return DensityMatrix::trusted(d, std::move(m));
}

WignerGridSpec default_wigner_grid(int n_a) {
  const double r = std::sqrt(double(n_a));
  return WignerGridSpec{-r, r, -r, r, 121, 121};
}

double WignerGrid::cell_area() const {
  if (re_axis.size() < 2 || im_axis.size() < 2) return 0.0;
  return (re_axis[1] - re_axis[0]) * (im_axis[1] - im_axis[0]);
}

double WignerGrid::integral() const { return values.sum() * cell_area(); }

WignerGrid wigner(const DensityMatrix& rho, const WignerGridSpec& spec, int jobs) {
  require_single_mode(rho.dims(), "wigner");
  if (spec.n_re < 2 || spec.n_im < 2 || !(spec.re_max > spec.re_min) ||
      !(spec.im_max > spec.im_min)) {
    throw std::invalid_argument("wigner: grid needs >= 2 points and increasing bounds per axis");
  }
  WignerGrid g;
  g.re_axis = axis(spec.re_min, spec.re_max, spec.n_re);
  g.im_axis = axis(spec.im_min, spec.im_max, spec.n_im);
  g.values.resize(spec.n_re, spec.n_im);
  const Eigen::MatrixXcd r = 0.5 * (rho.matrix() + rho.matrix().adjoint());
  parallel_for(static_cast<std::size_t>(spec.n_re), jobs, [&](std::size_t i) {
    for (int j = 0; j < spec.n_im; ++j) {
      g.values(static_cast<Eigen::Index>(i), j) = wigner_point(r, cplx(g.re_axis[i], g.im_axis[j]));
    }
  });
  const double outside = 1.0 - g.integral();
  if (outside > 1e-3) {
    std::ostringstream os;
    os << "Wigner grid misses " << outside << " of the phase-space mass; enlarge the grid";
    g.warnings.push_back(os.str());
  }
  return g;
}

LobeWeights lobe_weights(const WignerGrid& w, cplx lower_center, cplx upper_center) {
  LobeWeights out;
  if (std::abs(upper_center - lower_center) <= 1.0) {
    out.warnings.emplace_back("lobe centers closer than one phase-space unit; weights overlap");
  }
  const double area = w.cell_area();
  for (std::size_t i = 0; i < w.re_axis.size(); ++i) {
    for (std::size_t j = 0; j < w.im_axis.size(); ++j) {
      const cplx a(w.re_axis[i], w.im_axis[j]);
      const double v = w.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * area;
      if (std::norm(a - lower_center) <= std::norm(a - upper_center)) {
        out.lower += v;
      } else {
        out.upper += v;
      }
    }
  }
  return out;
}

std::vector<WignerPeak> local_maxima(const WignerGrid& w, double rel_threshold) {
  std::vector<WignerPeak> peaks;
  const Eigen::Index nr = w.values.rows();
  const Eigen::Index ni = w.values.cols();
  if (nr < 3 || ni < 3) return peaks;
  const double floor = rel_threshold * w.values.maxCoeff();
  for (Eigen::Index i = 1; i + 1 < nr; ++i) {
    for (Eigen::Index j = 1; j + 1 < ni; ++j) {
      const double v = w.values(i, j);
      if (v < floor) continue;
      bool is_max = true;
      for (int di = -1; di <= 1 && is_max; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          if ((di != 0 || dj != 0) && w.values(i + di, j + dj) >= v) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) peaks.push_back({cplx(w.re_axis[i], w.im_axis[j]), v});
    }
  }
  std::sort(peaks.begin(), peaks.end(),
            [](const WignerPeak& a, const WignerPeak& b) { return a.value > b.value; });
  return peaks;
}

}  // namespace kerrmech

namespace kerrmech {

const char* to_string(Observable o) {
  switch (o) {
    case Observable::PhotonNumber: return "photon_number";
    case Observable::AmplitudeSquared: return "amp2";
    case Observable::G2: return "g2";
    case Observable::MechanicalOccupation: return "mech_occupation";
  }
  return "?";
}

double measure(const DensityMatrix& rho, Observable o) {
  const FockConfig& d = rho.dims();
  switch (o) {
    case Observable::PhotonNumber:
      return optical_moment(rho, [](int k) { return double(k); });
    case Observable::AmplitudeSquared:
      return std::norm(expect(rho, ladder_op(d, Mode::Optical)));
    case Observable::G2: {
      const auto g2 = g2_zero(rho);
      if (!g2) throw std::domain_error("g2(0) undefined: photon number below 1e-9");
      return *g2;
    }
    case Observable::MechanicalOccupation:
      if (d.n_b < 2) return 0.0;
      return expect(rho, number_op(d, Mode::Mechanical)).real();
  }
  throw std::invalid_argument("measure: unknown observable");
}

}  // namespace kerrmech
