#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "kerrmech/fock.hpp"

namespace kerrmech {

struct CollapseChannel {
  FockOperator op;
  double rate = 0.0;
};

/// Superoperator acting on column-stacked density matrices:
/// vec(rho)[i + j D] = rho(i, j).
class Liouvillian {
 public:
  Liouvillian(FockConfig dims, SparseMatrix super);

  const FockConfig& dims() const { return dims_; }
  const SparseMatrix& matrix() const { return super_; }
  /// L[rho] as a D x D matrix.
  Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rho) const;

 private:
  FockConfig dims_;
  SparseMatrix super_;
};

/// L[rho] = -i[H, rho] + sum_k rate_k D_{o_k}[rho] with
/// D_o[rho] = o rho o^+ - (o^+o rho + rho o^+o)/2.
Liouvillian build_liouvillian(const FockOperator& h, std::span<const CollapseChannel> collapse);

/// {(a, kappa), (b, (n_th + 1) gamma_m), (b^+, n_th gamma_m)}.
std::vector<CollapseChannel> optomechanical_channels(const PhysicalParams& p,
                                                     const FockConfig& dims);
/// {(a, kappa)}.
std::vector<CollapseChannel> kerr_channels(const PhysicalParams& p, const FockConfig& dims);

Liouvillian build_liouvillian_om(const PhysicalParams& p, const FockConfig& dims);
Liouvillian build_liouvillian_kerr(const PhysicalParams& p, const FockConfig& dims);

enum class SolverMethod { Auto, Direct, Iterative };
const char* to_string(SolverMethod m);

struct SteadyStateOptions {
  SolverMethod method = SolverMethod::Auto;
  /// Largest Liouville dimension D^2 attempted with sparse LU under Auto.
  long long direct_limit = 250000;
  /// Iterative-refinement sweeps with the residual accumulated in extended
  /// precision (direct solver only).
  int refinement_steps = 0;
  /// Reciprocal condition estimate below which the kernel is treated as
  /// degenerate.
  double rcond_floor = 1e-14;
  double iterative_tol = 1e-12;
  int max_iterations = 20000;
  /// Skip the LU when its symbolic peak-memory estimate exceeds this many
  /// bytes (0 disables the check). Under Auto this falls back to iteration.
  double memory_cap_bytes = 0.0;
  /// Solutions with max |L[rho]| above this raise NotConverged.
  double residual_tol = 1e-8;
};

struct SteadyState {
  DensityMatrix rho;
  /// max |L[rho]| entry after Hermitization and normalization.
  double residual = 0.0;
  double min_eigenvalue = 0.0;  ///< before clipping
  double rcond = 0.0;           ///< direct solver only
  SolverMethod method = SolverMethod::Direct;
  std::vector<double> residual_history;
  std::vector<std::string> warnings;
};

class SteadyStateError : public std::runtime_error {
 public:
  enum class Kind { DegenerateKernel, NotConverged, OutOfMemory };
  SteadyStateError(Kind kind, const std::string& what, std::vector<double> history = {})
      : std::runtime_error(what), kind_(kind), history_(std::move(history)) {}
  Kind kind() const { return kind_; }
  const std::vector<double>& residual_history() const { return history_; }

 private:
  Kind kind_;
  std::vector<double> history_;
};

/// Solves L[rho] = 0 with Tr rho = 1 by replacing the (0,0) row of the
/// singular system with the trace functional. The direct path factorizes the
/// equivalent real system over the D^2 real parameters of a Hermitian rho. The result is Hermitized,
/// clipped to be positive semidefinite and trace-normalized.
SteadyState steady_state(const Liouvillian& l, const SteadyStateOptions& opts = {});

}  // namespace kerrmech
