#include "kerrmech/convergence.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>

namespace kerrmech {

long long max_liouville_dim() {
  constexpr long long kDefault = 250000;
  const char* env = std::getenv("KERRMECH_MAX_LIOUVILLE_DIM");
  if (env == nullptr || *env == '\0') return kDefault;
  char* end = nullptr;
  const long long v = std::strtoll(env, &end, 10);
  if (*end != '\0' || v <= 0) {
    throw ParameterError(std::string("KERRMECH_MAX_LIOUVILLE_DIM must be a positive integer, got '") +
                         env + "'");
  }
  return v;
}

void check_resource_cap(const FockConfig& dims, long long cap) {
  if (dims.liouville_dim() > cap) {
    std::ostringstream os;
    os << "Liouville dimension " << dims.liouville_dim() << " of " << to_string(dims)
       << " exceeds the cap " << cap;
    throw ResourceCapError(os.str(), dims.liouville_dim(), cap);
  }
}

Liouvillian build_liouvillian_for(const PhysicalParams& p, const FockConfig& dims) {
  return dims.n_b == 0 ? build_liouvillian_kerr(p, dims) : build_liouvillian_om(p, dims);
}

namespace {

int grow(int n) { return n + std::max(1, static_cast<int>(std::ceil(0.25 * n))); }

}  // namespace

ConvergenceResult convergence_study(const PhysicalParams& p, const FockConfig& seed,
                                    Observable observable, const ConvergenceOptions& opts) {
  seed.validate();
  if (seed.n_b == 1) throw DimensionError("convergence_study: n_b must be 0 or >= 2");
  ConvergenceResult out;
  FockConfig dims = seed;
  bool grow_optical = true;
  int stable = 0;
  while (true) {
    check_resource_cap(dims, opts.max_liouville_dim);
    const SteadyState ss = steady_state(build_liouvillian_for(p, dims), opts.solver);
    const double v = measure(ss.rho, observable);
    if (!out.ladder.empty()) {
      const double prev = out.ladder.back().value;
      const double change = std::abs(v - prev);
      stable = (change <= opts.rel_tol * std::abs(prev) || change <= 1e-12) ? stable + 1 : 0;
    }
    out.ladder.push_back({dims, v, ss.residual});
    if (stable >= opts.stable_steps) break;
    if (grow_optical || dims.n_b == 0) {
      dims.n_a = grow(dims.n_a);
    } else {
      dims.n_b = grow(dims.n_b);
    }
    if (dims.n_b > 0) grow_optical = !grow_optical;
  }
  out.value = out.ladder.back().value;
  out.dims = out.ladder.back().dims;
  return out;
}

}  // namespace kerrmech
