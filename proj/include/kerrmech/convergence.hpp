#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "kerrmech/liouvillian.hpp"
#include "kerrmech/observables.hpp"

namespace kerrmech {

/// D^2 cap from KERRMECH_MAX_LIOUVILLE_DIM (default 250000). Throws
/// ParameterError when the variable is set but not a positive integer.
long long max_liouville_dim();

class ResourceCapError : public std::runtime_error {
 public:
  ResourceCapError(const std::string& what, long long requested, long long cap)
      : std::runtime_error(what), requested_(requested), cap_(cap) {}
  long long requested() const { return requested_; }
  long long cap() const { return cap_; }

 private:
  long long requested_;
  long long cap_;
};

/// Throws ResourceCapError when dims.liouville_dim() exceeds cap.
void check_resource_cap(const FockConfig& dims, long long cap);

/// Optomechanical Liouvillian for n_b >= 2, Kerr Liouvillian for n_b = 0.
Liouvillian build_liouvillian_for(const PhysicalParams& p, const FockConfig& dims);

struct ConvergenceOptions {
  long long max_liouville_dim = 250000;
  double rel_tol = 0.005;
  /// Consecutive changes below rel_tol required.
  int stable_steps = 2;
  SteadyStateOptions solver;
};

struct ConvergenceStep {
  FockConfig dims;
  double value = 0.0;
  double residual = 0.0;
};

struct ConvergenceResult {
  double value = 0.0;
  FockConfig dims;
  std::vector<ConvergenceStep> ladder;
};

/// Grows the truncation by 25% per step (at least one level), alternating
/// n_a then n_b (n_a only for the Kerr system), until the observable changes
/// by less than rel_tol between consecutive sizes `stable_steps` times in a
/// row. Throws ResourceCapError when the next size would exceed the cap.
ConvergenceResult convergence_study(const PhysicalParams& p, const FockConfig& seed,
                                    Observable observable, const ConvergenceOptions& opts = {});

}  // namespace kerrmech
