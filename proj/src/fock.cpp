#include "kerrmech/fock.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>

#include "sparse_util.hpp"

namespace kerrmech {

using detail::kron;
using detail::sparse_identity;

namespace {

void require_same(const FockConfig& a, const FockConfig& b) {
  if (!(a == b)) {
    throw DimensionError("operator dimensions differ: " + to_string(a) + " vs " + to_string(b));
  }
}

// Single-mode annihilation operator on n levels.
SparseMatrix annihilation(int n) {
  SparseMatrix a(n, n);
  std::vector<Eigen::Triplet<cplx>> t;
  for (int k = 1; k < n; ++k) t.emplace_back(k - 1, k, std::sqrt(static_cast<double>(k)));
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

}  // namespace

void FockConfig::validate() const {
  if (n_a < 2) throw DimensionError("n_a must be >= 2");
  if (n_b < 0) throw DimensionError("n_b must be >= 0");
}

std::string to_string(const FockConfig& c) {
  std::ostringstream os;
  os << "(n_a=" << c.n_a << ", n_b=" << c.n_b << ")";
  return os.str();
}

FockOperator::FockOperator(FockConfig dims, SparseMatrix m) : dims_(dims), m_(std::move(m)) {
  dims_.validate();
  if (m_.rows() != dims_.dim() || m_.cols() != dims_.dim()) {
    throw DimensionError("matrix size does not match " + to_string(dims_));
  }
  m_.makeCompressed();
}

FockOperator FockOperator::identity(FockConfig dims) {
  dims.validate();
  return FockOperator(dims, sparse_identity(dims.dim()));
}

FockOperator FockOperator::zero(FockConfig dims) {
  dims.validate();
  return FockOperator(dims, SparseMatrix(dims.dim(), dims.dim()));
}

FockOperator FockOperator::adjoint() const {
  return FockOperator(dims_, SparseMatrix(m_.adjoint()));
}

double FockOperator::hermiticity_error() const {
  const SparseMatrix d = m_ - SparseMatrix(m_.adjoint());
  double worst = 0.0;
  for (int j = 0; j < d.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(d, j); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  return worst;
}

FockOperator& FockOperator::operator+=(const FockOperator& o) {
  require_same(dims_, o.dims_);
  m_ += o.m_;
  return *this;
}

FockOperator& FockOperator::operator-=(const FockOperator& o) {
  require_same(dims_, o.dims_);
  m_ -= o.m_;
  return *this;
}

FockOperator& FockOperator::operator*=(cplx s) {
  m_ *= s;
  return *this;
}

FockOperator operator*(const FockOperator& a, const FockOperator& b) {
  require_same(a.dims_, b.dims_);
  return FockOperator(a.dims_, SparseMatrix(a.m_ * b.m_));
}

FockOperator commutator(const FockOperator& a, const FockOperator& b) { return a * b - b * a; }

FockOperator ladder_op(const FockConfig& dims, Mode mode) {
  dims.validate();
  if (mode == Mode::Optical) {
    return FockOperator(dims, kron(annihilation(dims.n_a), sparse_identity(dims.mech_dim())));
  }
  if (dims.n_b < 2) throw DimensionError("mechanical ladder operator needs n_b >= 2");
  return FockOperator(dims, kron(sparse_identity(dims.n_a), annihilation(dims.n_b)));
}

FockOperator number_op(const FockConfig& dims, Mode mode) {
  const FockOperator a = ladder_op(dims, mode);
  return a.adjoint() * a;
}

FockOperator build_hamiltonian_om(const PhysicalParams& p, const FockConfig& dims) {
  if (dims.n_b < 2) throw DimensionError("optomechanical Hamiltonian needs n_b >= 2");
  const FockOperator a = ladder_op(dims, Mode::Optical);
  const FockOperator b = ladder_op(dims, Mode::Mechanical);
  const FockOperator ad = a.adjoint();
  const FockOperator bd = b.adjoint();
  const FockOperator na = ad * a;
  FockOperator h = p.omega_m * (bd * b);
  h -= p.delta0 * na;
  h -= p.g0 * (na * (b + bd));
  h += cplx(0.0, p.eps) * (a - ad);
  return h;
}

FockOperator build_hamiltonian_kerr(const PhysicalParams& p, const FockConfig& dims) {
  if (dims.n_b != 0) throw DimensionError("Kerr Hamiltonian needs n_b = 0");
  const FockOperator a = ladder_op(dims, Mode::Optical);
  const FockOperator ad = a.adjoint();
  const FockOperator na = ad * a;
  FockOperator h = -p.delta0 * na;
  h -= p.kerr_shift() * (na * na);
  h += cplx(0.0, p.eps) * (a - ad);
  return h;
}

double polaron_check(const PhysicalParams& p, const FockConfig& dims) {
  return polaron_check(p, dims, dims.n_a / 2, dims.n_b / 2);
}

double polaron_check(const PhysicalParams& p, const FockConfig& dims, int n_window,
                     int m_window) {
  if (dims.n_b < 2) throw DimensionError("polaron_check needs n_b >= 2");
  const int nb = dims.n_b;
  const double s = p.g0 / p.omega_m;

  // U is block diagonal in the photon number: exp[s n (b - b^+)] on block n.
  // i (b - b^+) is Hermitian, so exponentiate through its eigenbasis.
  const Eigen::MatrixXcd bm = Eigen::MatrixXcd(annihilation(nb));
  const Eigen::MatrixXcd gen = cplx(0.0, 1.0) * (bm - bm.adjoint());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gen);
  const Eigen::MatrixXcd& vecs = es.eigenvectors();
  const Eigen::VectorXd& vals = es.eigenvalues();

  const int d = dims.dim();
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(d, d);
  for (int n = 0; n < dims.n_a; ++n) {
    // exp[s n (b - b^+)] = exp[-i s n gen]
    Eigen::VectorXcd phase(nb);
    for (int k = 0; k < nb; ++k) phase(k) = std::exp(cplx(0.0, -s * n * vals(k)));
    u.block(n * nb, n * nb, nb, nb) = vecs * phase.asDiagonal() * vecs.adjoint();
  }

  PhysicalParams undriven = p;
  undriven.eps = 0.0;
  const Eigen::MatrixXcd h0 = build_hamiltonian_om(undriven, dims).dense();
  const Eigen::MatrixXcd transformed = u * h0 * u.adjoint();

  const FockOperator na = number_op(dims, Mode::Optical);
  FockOperator expected = -p.delta0 * na;
  expected -= p.kerr_shift() * (na * na);
  expected += p.omega_m * number_op(dims, Mode::Mechanical);
  const Eigen::MatrixXcd diff = transformed - expected.dense();

  double worst = 0.0;
  const int n_max = std::min(n_window, dims.n_a);
  const int m_max = std::min(m_window, nb);
  for (int n = 0; n < n_max; ++n) {
    for (int m = 0; m < m_max; ++m) {
      for (int n2 = 0; n2 < n_max; ++n2) {
        for (int m2 = 0; m2 < m_max; ++m2) {
          worst = std::max(worst, std::abs(diff(dims.index(n, m), dims.index(n2, m2))));
        }
      }
    }
  }
  return worst;
}

DensityMatrix::DensityMatrix(FockConfig dims, Eigen::MatrixXcd m) : dims_(dims), m_(std::move(m)) {
  dims_.validate();
  if (m_.rows() != dims_.dim() || m_.cols() != dims_.dim()) {
    throw DimensionError("density matrix size does not match " + to_string(dims_));
  }
  if (std::abs(m_.trace() - 1.0) > kTraceTol) throw std::domain_error("density matrix trace != 1");
  if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol) {
    throw std::domain_error("density matrix is not Hermitian");
  }
  if (min_eigenvalue() < -kPsdTol) throw std::domain_error("density matrix is not PSD");
}

DensityMatrix DensityMatrix::trusted(FockConfig dims, Eigen::MatrixXcd m) {
  DensityMatrix r;
  r.dims_ = dims;
  r.m_ = std::move(m);
  return r;
}

double DensityMatrix::min_eigenvalue() const {
  const Eigen::MatrixXcd h = 0.5 * (m_ + m_.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Eigen::MatrixXcd hermitize_and_clip(const Eigen::MatrixXcd& m, double* min_eigenvalue) {
  const Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  Eigen::VectorXd vals = es.eigenvalues();
  if (min_eigenvalue) *min_eigenvalue = vals.minCoeff();
  vals = vals.cwiseMax(0.0);
  const double total = vals.sum();
  if (!(total > 0.0)) throw std::domain_error("state has no positive weight");
  vals /= total;
  return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace kerrmech
