#include "kerrmech/liouvillian.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <type_traits>

#include <Eigen/IterativeLinearSolvers>

#include "sparse_util.hpp"
#include "umfpack_lu.hpp"

namespace kerrmech {

namespace {

using detail::kron;
using detail::sparse_identity;
using RealMatrix = detail::UmfpackLu<double>::Matrix;
using ComplexMatrix = detail::UmfpackLu<cplx>::Matrix;

// L with the (0,0) row swapped for the trace functional.
template <typename Matrix>
Matrix trace_augmented(const SparseMatrix& l, int d) {
  using Index = typename Matrix::StorageIndex;
  std::vector<Eigen::Triplet<cplx, Index>> t;
  t.reserve(static_cast<std::size_t>(l.nonZeros()) + d);
  for (int j = 0; j < l.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(l, j); it; ++it) {
      if (it.row() != 0) t.emplace_back(it.row(), j, it.value());
    }
  }
  for (int i = 0; i < d; ++i) t.emplace_back(0, i + i * d, cplx(1.0, 0.0));
  Matrix a(l.rows(), l.cols());
  a.setFromTriplets(t.begin(), t.end());
  a.makeCompressed();
  return a;
}

// Real parametrization of Hermitian rho: Re rho_ii, and (Re, Im) rho_ij for
// i < j, D^2 unknowns in total. L preserves Hermiticity, so only equations
// (i, j) with i <= j are kept, and the imaginary part of diagonal ones
// vanishes identically.
class HermitianLayout {
 public:
  explicit HermitianLayout(int d) : d_(d), slot_(static_cast<std::size_t>(d) * d, -1) {
    SuiteSparse_long next = 0;
    for (int j = 0; j < d; ++j) {
      for (int i = 0; i <= j; ++i) {
        slot_[i + static_cast<std::size_t>(j) * d] = next;
        next += (i == j) ? 1 : 2;
      }
    }
  }
  /// Slot of Re rho_ij for i <= j; Im rho_ij follows at +1 when i < j.
  SuiteSparse_long slot(int i, int j) const { return slot_[i + static_cast<std::size_t>(j) * d_]; }

  RealMatrix system(const SparseMatrix& l) const {
    const int d = d_;
    std::vector<Eigen::Triplet<double, SuiteSparse_long>> t;
    t.reserve(static_cast<std::size_t>(l.nonZeros()) * 2 + d);
    for (Eigen::Index c = 0; c < l.outerSize(); ++c) {
      const int k = static_cast<int>(c % d);
      const int m = static_cast<int>(c / d);
      const bool diag = k == m;
      const SuiteSparse_long xr = diag ? slot(k, k) : slot(std::min(k, m), std::max(k, m));
      const double sigma = k < m ? 1.0 : -1.0;
      for (SparseMatrix::InnerIterator it(l, c); it; ++it) {
        const int i = static_cast<int>(it.row() % d);
        const int j = static_cast<int>(it.row() / d);
        if (i > j) continue;
        const SuiteSparse_long row = slot(i, j);
        const cplx v = it.value();
        if (row != 0) {
          t.emplace_back(row, xr, v.real());
          if (!diag) t.emplace_back(row, xr + 1, -sigma * v.imag());
        }
        if (i < j) {
          t.emplace_back(row + 1, xr, v.imag());
          if (!diag) t.emplace_back(row + 1, xr + 1, sigma * v.real());
        }
      }
    }
    for (int i = 0; i < d; ++i) t.emplace_back(0, slot(i, i), 1.0);
    const auto n = static_cast<SuiteSparse_long>(d) * d;
    RealMatrix a(n, n);
    a.setFromTriplets(t.begin(), t.end());
    a.makeCompressed();
    return a;
  }

  Eigen::MatrixXcd unpack(const Eigen::VectorXd& x) const {
    Eigen::MatrixXcd rho(d_, d_);
    for (int j = 0; j < d_; ++j) {
      rho(j, j) = x(slot(j, j));
      for (int i = 0; i < j; ++i) {
        const SuiteSparse_long s = slot(i, j);
        rho(i, j) = cplx(x(s), x(s + 1));
        rho(j, i) = cplx(x(s), -x(s + 1));
      }
    }
    return rho;
  }

 private:
  int d_;
  std::vector<SuiteSparse_long> slot_;
};

// b - A x accumulated in extended precision.
template <typename Matrix, typename Vector>
Vector residual_extended(const Matrix& a, const Vector& x, const Vector& b) {
  using Wide = std::conditional_t<std::is_same_v<typename Vector::Scalar, double>, long double,
                                  std::complex<long double>>;
  std::vector<Wide> acc(b.data(), b.data() + b.size());
  for (Eigen::Index j = 0; j < a.outerSize(); ++j) {
    const Wide xj(x(j));
    for (typename Matrix::InnerIterator it(a, j); it; ++it) acc[it.row()] -= Wide(it.value()) * xj;
  }
  Vector r(b.size());
  for (Eigen::Index i = 0; i < b.size(); ++i) r(i) = static_cast<typename Vector::Scalar>(acc[i]);
  return r;
}

// Some optimized BLAS builds return wrong real triangular solves on certain
// CPUs (seen with OpenBLAS 0.3.20 on its Cooperlake kernels). Factorize a
// small dense real system once and check the answer.
bool real_lu_trustworthy() {
  static const bool ok = [] {
    constexpr int n = 64;
    std::vector<Eigen::Triplet<double, SuiteSparse_long>> t;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double v = 1.0 / (1.0 + std::abs(i - j)) + 0.1 * std::sin(7.0 * i + 3.0 * j);
        t.emplace_back(i, j, v + (i == j ? 2.0 : 0.0));
      }
    }
    RealMatrix a(n, n);
    a.setFromTriplets(t.begin(), t.end());
    a.makeCompressed();
    const detail::UmfpackLu<double> lu(a, {});
    if (!lu.ok()) return false;
    const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(n, 1.0, 2.0);
    return (a * lu.solve(b) - b).cwiseAbs().maxCoeff() < 1e-10;
  }();
  return ok;
}

struct RawSolution {
  Eigen::MatrixXcd rho;
  Eigen::VectorXd x_real;
  Eigen::VectorXcd x_complex;
  std::vector<std::string> warnings;
  double rcond = 0.0;
  std::vector<double> history;
  SolverMethod method = SolverMethod::Direct;
};

template <typename Scalar>
RawSolution factor_and_solve(const typename detail::UmfpackLu<Scalar>::Matrix& a,
                             const SteadyStateOptions& opts) {
  using Vector = typename detail::UmfpackLu<Scalar>::Vector;
  detail::UmfpackOptions lu_opts;
  lu_opts.memory_cap_bytes = opts.memory_cap_bytes;
  const detail::UmfpackLu<Scalar> lu(a, lu_opts);
  if (lu.status() == UMFPACK_ERROR_out_of_memory) {
    throw SteadyStateError(SteadyStateError::Kind::OutOfMemory, "sparse LU ran out of memory");
  }
  if (lu.status() == UMFPACK_WARNING_singular_matrix || !(lu.rcond() >= opts.rcond_floor)) {
    std::ostringstream os;
    os << "steady state is not unique: trace-augmented Liouvillian is singular (rcond = "
       << lu.rcond() << ")";
    throw SteadyStateError(SteadyStateError::Kind::DegenerateKernel, os.str());
  }
  if (!lu.ok()) {
    throw SteadyStateError(SteadyStateError::Kind::NotConverged,
                           "sparse LU failed with UMFPACK status " + std::to_string(lu.status()));
  }
  RawSolution out;
  out.rcond = lu.rcond();
  Vector b = Vector::Zero(a.rows());
  b(0) = 1.0;
  Vector x = lu.solve(b);
  out.history.push_back(residual_extended(a, x, b).cwiseAbs().maxCoeff());
  for (int k = 0; k < opts.refinement_steps; ++k) {
    x += lu.solve(residual_extended(a, x, b));
    out.history.push_back(residual_extended(a, x, b).cwiseAbs().maxCoeff());
  }
  if constexpr (std::is_same_v<Scalar, double>) {
    out.x_real = std::move(x);
  } else {
    out.x_complex = std::move(x);
  }
  return out;
}

RawSolution solve_direct(const SparseMatrix& l, int d, const SteadyStateOptions& opts) {
  if (real_lu_trustworthy()) {
    const HermitianLayout layout(d);
    RawSolution out = factor_and_solve<double>(layout.system(l), opts);
    out.rho = layout.unpack(out.x_real);
    return out;
  }
  RawSolution out = factor_and_solve<cplx>(trace_augmented<ComplexMatrix>(l, d), opts);
  out.rho = Eigen::Map<const Eigen::MatrixXcd>(out.x_complex.data(), d, d);
  out.warnings.emplace_back(
      "real sparse LU failed its self-check (faulty BLAS?); used the complex formulation");
  return out;
}

RawSolution solve_iterative(const SparseMatrix& l, int d, const SteadyStateOptions& opts) {
  const SparseMatrix a = trace_augmented<SparseMatrix>(l, d);
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(l.rows());
  b(0) = 1.0;
  Eigen::BiCGSTAB<SparseMatrix, Eigen::IncompleteLUT<cplx>> solver;
  solver.preconditioner().setDroptol(1e-6);
  solver.preconditioner().setFillfactor(20);
  solver.compute(a);
  if (solver.info() != Eigen::Success) {
    throw SteadyStateError(SteadyStateError::Kind::NotConverged,
                           "incomplete LU preconditioner failed");
  }
  solver.setTolerance(opts.iterative_tol);
  constexpr int kChunk = 50;
  solver.setMaxIterations(kChunk);

  RawSolution out;
  out.method = SolverMethod::Iterative;
  // Start from the maximally mixed state.
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(l.rows());
  for (int i = 0; i < d; ++i) x(i + i * d) = 1.0 / d;
  for (int done = 0; done < opts.max_iterations; done += kChunk) {
    x = solver.solveWithGuess(b, x);
    out.history.push_back(solver.error());
    if (solver.info() == Eigen::Success) {
      out.rho = Eigen::Map<const Eigen::MatrixXcd>(x.data(), d, d);
      return out;
    }
    if (!x.allFinite()) break;
  }
  throw SteadyStateError(SteadyStateError::Kind::NotConverged,
                         "iterative steady-state solve did not converge", out.history);
}

}  // namespace

Liouvillian::Liouvillian(FockConfig dims, SparseMatrix super)
    : dims_(dims), super_(std::move(super)) {
  if (super_.rows() != dims_.liouville_dim() || super_.cols() != dims_.liouville_dim()) {
    throw DimensionError("superoperator size does not match " + to_string(dims_));
  }
  super_.makeCompressed();
}

Eigen::MatrixXcd Liouvillian::apply(const Eigen::MatrixXcd& rho) const {
  const int d = dims_.dim();
  if (rho.rows() != d || rho.cols() != d) throw DimensionError("apply: state size mismatch");
  const Eigen::Map<const Eigen::VectorXcd> v(rho.data(), static_cast<Eigen::Index>(d) * d);
  const Eigen::VectorXcd out = super_ * v;
  return Eigen::Map<const Eigen::MatrixXcd>(out.data(), d, d);
}

Liouvillian build_liouvillian(const FockOperator& h, std::span<const CollapseChannel> collapse) {
  const FockConfig& dims = h.dims();
  const int d = dims.dim();
  // With H_eff = H - (i/2) sum_k r_k o_k^+ o_k:
  // L = -i I (x) H_eff + i conj(H_eff) (x) I + sum_k r_k conj(o_k) (x) o_k.
  SparseMatrix heff = h.matrix();
  SparseMatrix jump(static_cast<Eigen::Index>(d) * d, static_cast<Eigen::Index>(d) * d);
  for (const CollapseChannel& c : collapse) {
    if (!(c.op.dims() == dims)) throw DimensionError("collapse operator dimension mismatch");
    if (!(c.rate >= 0.0) || !std::isfinite(c.rate)) {
      throw std::invalid_argument("collapse rates must be finite and >= 0");
    }
    if (c.rate == 0.0) continue;
    const SparseMatrix& o = c.op.matrix();
    heff -= cplx(0.0, 0.5 * c.rate) * SparseMatrix(o.adjoint() * o);
    jump += c.rate * kron(SparseMatrix(o.conjugate()), o);
  }
  const SparseMatrix id = sparse_identity(d);
  SparseMatrix super = cplx(0.0, -1.0) * kron(id, heff);
  super += cplx(0.0, 1.0) * kron(SparseMatrix(heff.conjugate()), id);
  super += jump;
  super.prune(cplx(0.0, 0.0));
  return Liouvillian(dims, std::move(super));
}

std::vector<CollapseChannel> optomechanical_channels(const PhysicalParams& p,
                                                     const FockConfig& dims) {
  const FockOperator a = ladder_op(dims, Mode::Optical);
  const FockOperator b = ladder_op(dims, Mode::Mechanical);
  return {{a, p.kappa}, {b, (p.n_th + 1.0) * p.gamma_m}, {b.adjoint(), p.n_th * p.gamma_m}};
}

std::vector<CollapseChannel> kerr_channels(const PhysicalParams& p, const FockConfig& dims) {
  return {{ladder_op(dims, Mode::Optical), p.kappa}};
}

Liouvillian build_liouvillian_om(const PhysicalParams& p, const FockConfig& dims) {
  validate(p);
  const auto channels = optomechanical_channels(p, dims);
  return build_liouvillian(build_hamiltonian_om(p, dims), channels);
}

Liouvillian build_liouvillian_kerr(const PhysicalParams& p, const FockConfig& dims) {
  validate(p);
  const auto channels = kerr_channels(p, dims);
  return build_liouvillian(build_hamiltonian_kerr(p, dims), channels);
}

const char* to_string(SolverMethod m) {
  switch (m) {
    case SolverMethod::Auto: return "auto";
    case SolverMethod::Direct: return "direct";
    case SolverMethod::Iterative: return "iterative";
  }
  return "?";
}

SteadyState steady_state(const Liouvillian& l, const SteadyStateOptions& opts) {
  const int d = l.dims().dim();
  std::vector<std::string> warnings;

  RawSolution raw;
  const bool direct_first =
      opts.method == SolverMethod::Direct ||
      (opts.method == SolverMethod::Auto && l.dims().liouville_dim() <= opts.direct_limit);
  if (direct_first) {
    try {
      raw = solve_direct(l.matrix(), d, opts);
    } catch (const SteadyStateError& e) {
      if (e.kind() != SteadyStateError::Kind::OutOfMemory || opts.method != SolverMethod::Auto) {
        throw;
      }
      warnings.emplace_back("sparse LU out of memory; fell back to the iterative solver");
      raw = solve_iterative(l.matrix(), d, opts);
    }
  } else {
    raw = solve_iterative(l.matrix(), d, opts);
  }
  warnings.insert(warnings.end(), raw.warnings.begin(), raw.warnings.end());
  if (raw.method == SolverMethod::Direct && raw.rcond < 1e-10) {
    std::ostringstream os;
    os << "ill-conditioned steady-state system (rcond = " << raw.rcond
       << "); kernel may be numerically ambiguous";
    warnings.push_back(os.str());
  }

  Eigen::MatrixXcd rho = std::move(raw.rho);
  rho /= rho.trace();
  double min_eig = 0.0;
  rho = hermitize_and_clip(rho, &min_eig);
  if (min_eig < -kPsdTol) {
    std::ostringstream os;
    os << "steady state has eigenvalue " << min_eig << " below the PSD tolerance; clipped";
    warnings.push_back(os.str());
  }

  const double residual = l.apply(rho).cwiseAbs().maxCoeff();
  if (!(residual <= opts.residual_tol)) {
    std::ostringstream os;
    os << "steady-state residual " << residual << " exceeds " << opts.residual_tol;
    throw SteadyStateError(SteadyStateError::Kind::NotConverged, os.str(), raw.history);
  }
  return SteadyState{.rho = DensityMatrix::trusted(l.dims(), rho),
                     .residual = residual,
                     .min_eigenvalue = min_eig,
                     .rcond = raw.rcond,
                     .method = raw.method,
                     .residual_history = std::move(raw.history),
                     .warnings = std::move(warnings)};
}

}  // namespace kerrmech
