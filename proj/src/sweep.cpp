#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "kerrmech/convergence.hpp"
#include "kerrmech/harness.hpp"
#include "kerrmech/parallel.hpp"

namespace kerrmech {

namespace {

using Point = std::pair<double, double>;  // (y, z)

std::vector<SweepRecord> run_points(const RunPlan& plan, const std::vector<Point>& points,
                                    bool quantum) {
  std::vector<SweepRecord> out(points.size());
  const long long cap = quantum ? max_liouville_dim() : 0;
  parallel_for(points.size(), plan.jobs, [&](std::size_t i) {
    const auto [y, z] = points[i];
    SweepRecord r = semiclassical_record(plan, y, z);
    if (quantum) {
      try {
        r.quantum = solve_quantum_point(plan.physical(y, z), plan.quantum, cap).block;
      } catch (const std::exception& e) {
        r.quantum_error = e.what();
      }
    }
    out[i] = std::move(r);
  });
  return out;
}

// Locates changes of the real-root count along a grid by bisection.
template <typename CountAt>
std::vector<double> find_folds(const std::vector<double>& grid, CountAt count_at) {
  std::vector<double> folds;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    double lo = grid[i - 1], hi = grid[i];
    const std::size_t c_lo = count_at(lo);
    if (c_lo == count_at(hi)) continue;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      if (std::abs(hi - lo) <= 1e-12 * std::max(std::abs(lo), std::abs(hi))) break;
      (count_at(mid) == c_lo ? lo : hi) = mid;
    }
    folds.push_back(0.5 * (lo + hi));
  }
  return folds;
}

}  // namespace

std::vector<double> linear_grid(double lo, double hi, int count) {
  if (count < 1) return {};
  if (count == 1) return {lo};
  std::vector<double> g(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) g[i] = lo + (hi - lo) * i / (count - 1);
  g.back() = hi;
  return g;
}

std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> g = linear_grid(std::log10(lo), std::log10(hi), count);
  for (double& v : g) v = std::pow(10.0, v);
  if (!g.empty()) {
    g.front() = lo;
    if (count > 1) g.back() = hi;
  }
  return g;
}

SweepRecord semiclassical_record(const RunPlan& plan, double y, double z) {
  SweepRecord r;
  r.y = y;
  r.z = z;
  r.chi = plan.base.chi;
  r.sideband = plan.base.sideband;
  r.q_m = plan.base.q_m;
  r.n_th = plan.n_th;
  const std::vector<double> roots = mean_field_roots(y, z);
  auto stability = [&](double lam) {
    return classify(rh_coefficients_scaled(lam, y, plan.base.sideband, plan.base.q_m));
  };
  if (roots.size() == 3) {
    for (int k = 0; k < 3; ++k) {
      r.lam[k] = roots[k];
      r.stab[k] = stability(roots[k]);
    }
  } else {
    const auto window = bistability_window(y);
    const int slot = (window && z >= window->z_plus) ? 2 : 0;
    r.lam[slot] = roots.front();
    r.stab[slot] = stability(roots.front());
  }
  r.region = region_classify(y, z, plan.base.sideband, plan.base.q_m);
  return r;
}

QuantumPoint solve_quantum_point(const PhysicalParams& p, const QuantumSettings& q, long long cap) {
  check_resource_cap(q.dims, cap);
  SteadyStateOptions opts;
  opts.method = q.method;
  opts.refinement_steps = q.refinement_steps;
  const SteadyState om = steady_state(build_liouvillian_om(p, q.dims), opts);
  QuantumPoint out{QuantumBlock{}, partial_trace_optical(om.rho), std::nullopt};
  QuantumBlock& b = out.block;
  b.photon_number = measure(out.rho_optical, Observable::PhotonNumber);
  b.amp_sq = measure(out.rho_optical, Observable::AmplitudeSquared);
  b.g2 = g2_zero(out.rho_optical);
  b.dims = q.dims;
  b.residual = om.residual;
  b.warnings = om.warnings;
  if (q.kerr_twin) {
    const SteadyState kerr = steady_state(build_liouvillian_kerr(p, FockConfig{q.dims.n_a, 0}), opts);
    b.fidelity_vs_kerr = fidelity(out.rho_optical, kerr.rho);
    b.kerr_photon_number = measure(kerr.rho, Observable::PhotonNumber);
    b.kerr_g2 = g2_zero(kerr.rho);
    b.residual = std::max(b.residual, kerr.residual);
    for (const auto& w : kerr.warnings) b.warnings.push_back("kerr: " + w);
    out.rho_kerr = kerr.rho;
  }
  return out;
}

SweepResult sweep_power(const RunPlan& plan) {
  std::vector<double> grid = plan.z_grid;
  if (grid.empty() && plan.has_z) grid.push_back(plan.base.z);
  if (grid.empty()) throw ConfigError("power sweep needs [sweep] z values or [physical] z");
  const double y = plan.base.y;
  std::vector<Point> points;
  for (double z : grid) points.emplace_back(y, z);
  SweepResult out;
  out.records = run_points(plan, points, plan.quantum.enabled);
  out.folds = find_folds(grid, [y](double z) { return mean_field_roots(y, z).size(); });
  return out;
}

SweepResult sweep_detuning(const RunPlan& plan) {
  if (plan.y_grid.empty()) throw ConfigError("detuning sweep needs [sweep] y values");
  if (!plan.has_z) throw ConfigError("detuning sweep needs [physical] z");
  const double z = plan.base.z;
  std::vector<Point> points;
  for (double y : plan.y_grid) points.emplace_back(y, z);
  SweepResult out;
  out.records = run_points(plan, points, plan.quantum.enabled);
  out.folds = find_folds(plan.y_grid, [z](double y) { return mean_field_roots(y, z).size(); });
  return out;
}

RegionMap region_map(const RunPlan& plan) {
  RegionMap out;
  if (plan.y_grid.empty() || plan.z_grid.empty()) return out;
  std::vector<Point> points;
  for (double y : plan.y_grid) {
    for (double z : plan.z_grid) points.emplace_back(y, z);
  }
  out.cells = run_points(plan, points, false);

  const auto [y_lo, y_hi] = std::minmax_element(plan.y_grid.begin(), plan.y_grid.end());
  BoundaryCurve zm{"z_minus", {}}, zp{"z_plus", {}}, zc{"z_c", {}};
  for (double y : linear_grid(*y_lo, *y_hi, plan.boundary_points)) {
    if (const auto w = bistability_window(y)) {
      zm.points.push_back({y, w->z_minus});
      zp.points.push_back({y, w->z_plus});
    }
    if (y > 0.0) {
      try {
        const double c = critical_power(y, plan.base.sideband, plan.base.q_m);
        if (std::isfinite(c)) zc.points.push_back({y, c});
      } catch (const BracketError&) {
      }
    }
  }
  out.boundaries = {std::move(zm), std::move(zp), std::move(zc)};
  return out;
}

std::vector<NcCell> nc_surface(const RunPlan& plan) {
  const double y = plan.base.y;
  if (!(y > 0.0)) throw ConfigError("ncmap needs y > 0 (n_Delta = y / 2chi)");
  std::vector<NcCell> cells;
  for (double sb : plan.sideband_grid) {
    for (double q : plan.q_m_grid) cells.push_back({sb, q, 0.0, 0.0, ""});
  }
  parallel_for(cells.size(), plan.jobs, [&](std::size_t i) {
    NcCell& c = cells[i];
    try {
      c.chi_nc = critical_occupation(y, c.sideband, c.q_m);
      c.ratio = c.chi_nc / (0.5 * y);
      c.status = std::isfinite(c.chi_nc) ? "ok" : "stable";
    } catch (const BracketError&) {
      c.chi_nc = c.ratio = std::numeric_limits<double>::quiet_NaN();
      c.status = "bracket_error";
    }
  });
  return cells;
}

}  // namespace kerrmech
