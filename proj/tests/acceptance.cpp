// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kerrmech/convergence.hpp"
#include "kerrmech/harness.hpp"
#include "kerrmech/liouvillian.hpp"
#include "kerrmech/observables.hpp"
#include "kerrmech/semiclassical.hpp"
#include "test_support.hpp"

using namespace kerrmech;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

// Quantum points shared by the steady-state and Wigner criteria.
struct SweepPoint {
  double z = 0.0;
  QuantumPoint q;
};
std::vector<SweepPoint> g_sweep;

Verdict threshold_constants() {
  const auto w = bistability_window(std::sqrt(3.0) / 2.0);
  if (!w) return {false, "no window at the threshold detuning"};
  const double zt = 1.0 / (6.0 * std::sqrt(3.0));
  const double err = std::max({std::abs(w->z_minus - zt), std::abs(w->z_plus - zt),
                               std::abs(kThresholdY - std::sqrt(3.0) / 2.0), std::abs(kThresholdZ - zt)});
  std::ostringstream os;
  os << "max deviation " << err;
  return {err <= 1e-12, os.str()};
}

Verdict root_oracle() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> uy(0.0, 3.0), uz(0.0, 1.0);
  double worst = 0.0;
  int mismatches = 0, skipped = 0;
  for (int k = 0; k < 10000; ++k) {
    const double y = uy(rng), z = uz(rng);
    const auto roots = mean_field_roots(y, z);
    for (double r : roots) worst = std::max(worst, std::abs(mean_field_polynomial(r, y, z)));
    const long double disc = testing::cubic_discriminant(y, z);
    if (std::abs(disc) < 1e-10L) {
      ++skipped;
      continue;
    }
    if (roots.size() != (disc > 0 ? 3u : 1u)) ++mismatches;
  }
  std::uniform_real_distribution<double> uc(0.01, 0.2), uzk(1e-3, 1.0);
  double kerr = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const PhysicalParams p = from_dimensionless({uc(rng), uy(rng), uzk(rng), 30.0, 300.0});
    for (const MeanFieldBranch& b : solve_branches(p)) kerr = std::max(kerr, testing::kerr_mfe_residual(p, b));
  }
  std::ostringstream os;
  os << "max residual " << worst << ", count mismatches " << mismatches << " (" << skipped
     << " near-fold draws skipped), Kerr-shift residual " << kerr;
  return {worst <= 1e-10 && mismatches == 0 && kerr <= 1e-9, os.str()};
}

Verdict stability_cross_validation() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> uy(-1.0, 3.0), uz(1e-3, 2.0), ul(std::log(0.05), std::log(100.0)),
      uq(std::log(10.0), std::log(1e5));
  int compared = 0, disagree = 0;
  while (compared < 2000) {
    const PhysicalParams p =
        from_dimensionless({0.05, uy(rng), uz(rng), std::exp(ul(rng)), std::exp(uq(rng))});
    for (const MeanFieldBranch& b : solve_branches(p)) {
      const double re = testing::min_real_eigenvalue(b, p);
      if (std::abs(re) < 1e-8) continue;
      ++compared;
      if ((b.stability == Stability::Stable) != (re > 0.0)) ++disagree;
    }
  }
  std::ostringstream os;
  os << disagree << " disagreements on " << compared << " branches";
  return {disagree == 0, os.str()};
}

Verdict critical_values() {
  const double nc = critical_occupation(1.5, 30.0, 300.0) / 0.08;
  const double zc = critical_power(1.5, 30.0, 300.0);
  std::ostringstream os;
  os << "n_c = " << nc << ", z_c = " << zc;
  return {std::abs(nc - 42.0) <= 4.2 && std::abs(zc - 92.0) <= 9.2, os.str()};
}

Verdict region_order() {
  const Region want[] = {Region::I, Region::II, Region::III, Region::IV};
  const double zs[] = {0.05, 0.26, 0.30, 1.0};
  bool ok = true;
  std::ostringstream os;
  for (int i = 0; i < 4; ++i) {
    const Region r = region_classify(1.5, zs[i], 10.0, 1000.0);
    ok = ok && r == want[i];
    os << (i ? " " : "") << to_string(r);
  }
  const double zc = critical_power(1.5, 10.0, 1000.0);
  const double lc = critical_occupation(1.5, 10.0, 1000.0);
  // Independent cross-check: the upper root crosses chi n_c between 0.26 and 0.30.
  const double up26 = mean_field_roots(1.5, 0.26).back(), up30 = mean_field_roots(1.5, 0.30).back();
  ok = ok && up26 < lc && up30 > lc && zc > 0.26 && zc < 0.30;
  os << " (z_c = " << zc << ", chi n_c = " << lc << ")";
  return {ok, os.str()};
}

Verdict linear_limit() {
  PhysicalParams p = testing::bistable_params(0.0);
  p.g0 = 0.0;
  p.eps = std::sqrt(5.0 * (p.delta0 * p.delta0 + p.kappa * p.kappa / 4.0));
  const cplx alpha = p.eps / cplx(-p.kappa / 2.0, p.delta0);
  const DensityMatrix coh = coherent_state(40, alpha);
  const SteadyState kerr = steady_state(build_liouvillian_kerr(p, {40, 0}));
  const SteadyState om = steady_state(build_liouvillian_om(p, {40, 2}));
  const DensityMatrix om_opt = partial_trace_optical(om.rho);
  const double n1 = measure(kerr.rho, Observable::PhotonNumber);
  const double n2 = measure(om_opt, Observable::PhotonNumber);
  const double f1 = fidelity(kerr.rho, coh), f2 = fidelity(om_opt, coh);
  const double dn = std::max(std::abs(n1 - 5.0), std::abs(n2 - 5.0)) / 5.0;
  std::ostringstream os;
  os << "n = " << n1 << " / " << n2 << " (rel err " << dn << "), F = " << f1 << " / " << f2;
  return {dn <= 1e-6 && std::min(f1, f2) >= 1.0 - 1e-6, os.str()};
}

Verdict bistable_steady_states() {
  const double zs[] = {0.10, 0.18, 0.22, 0.26, 0.30, 0.40};
  QuantumSettings qs;
  qs.enabled = true;
  qs.dims = {30, 10};
  qs.kerr_twin = true;
  const long long cap = max_liouville_dim();
  g_sweep.clear();
  for (double z : zs) g_sweep.push_back({z, solve_quantum_point(testing::bistable_params(z), qs, cap)});

  const auto w = bistability_window(1.5);
  const double quarter = 0.25 * (w->z_plus - w->z_minus);
  bool a = true, b = true, c = true, d = true;
  std::ostringstream os;
  double prev_n = -1.0;
  for (const SweepPoint& pt : g_sweep) {
    const QuantumBlock& q = pt.q.block;
    const auto roots = mean_field_roots(1.5, pt.z);
    const double n_lo = roots.front() / 0.08, n_hi = roots.back() / 0.08;
    const bool inside = pt.z > w->z_minus && pt.z < w->z_plus;
    // Inside the window the photon number lies strictly between the branches;
    // outside, within 10% of the single branch. Monotone in z throughout.
    if (inside) {
      a = a && q.photon_number > n_lo && q.photon_number < n_hi;
    } else {
      a = a && std::abs(q.photon_number - n_lo) <= 0.1 * n_lo;
    }
    a = a && q.photon_number > prev_n;
    prev_n = q.photon_number;

    if (!q.g2 || !q.kerr_g2 || !q.fidelity_vs_kerr) return {false, "missing g2 or fidelity"};
    if (inside) b = b && *q.g2 > 1.0;
    if (pt.z > w->z_plus) b = b && *q.g2 < 1.0;
    c = c && std::abs(*q.g2 - *q.kerr_g2) <= 0.05 * *q.kerr_g2;
    const bool deep = pt.z >= w->z_minus + quarter && pt.z <= w->z_plus - quarter;
    d = d && *q.fidelity_vs_kerr >= (deep ? 0.9 : 0.95);
    os << "z=" << pt.z << ":n=" << q.photon_number << ",g2=" << *q.g2 << "/" << *q.kerr_g2
       << ",F=" << *q.fidelity_vs_kerr << "; ";
  }
  os << "(a)" << (a ? "ok" : "fail") << " (b)" << (b ? "ok" : "fail") << " (c)" << (c ? "ok" : "fail")
     << " (d)" << (d ? "ok" : "fail");
  return {a && b && c && d, os.str()};
}

Verdict wigner_two_lobes() {
  const SweepPoint* pt = nullptr;
  for (const SweepPoint& p : g_sweep) {
    if (p.z == 0.26) pt = &p;
  }
  std::optional<QuantumPoint> solved;
  if (!pt) {
    QuantumSettings qs;
    qs.dims = {30, 10};
    qs.kerr_twin = false;
    solved = solve_quantum_point(testing::bistable_params(0.26), qs, max_liouville_dim());
  }
  const DensityMatrix& rho = pt ? pt->q.rho_optical : solved->rho_optical;
  const WignerGrid w = wigner(rho, default_wigner_grid(30));
  const auto peaks = local_maxima(w, 0.1);
  const auto branches = solve_branches(testing::bistable_params(0.26));
  const cplx lower = branches.front().a_bar, upper = branches.back().a_bar;
  const double min_w = w.values.minCoeff();
  std::ostringstream os;
  os << peaks.size() << " maxima";
  for (const WignerPeak& p : peaks) os << " (" << p.alpha.real() << "," << p.alpha.imag() << ")";
  os << " vs mean field (" << lower.real() << "," << lower.imag() << ") (" << upper.real() << ","
     << upper.imag() << "), min W " << min_w;
  if (peaks.size() != 2) return {false, os.str()};
  const double d_direct = std::max(std::abs(peaks[0].alpha - lower), std::abs(peaks[1].alpha - upper));
  const double d_swap = std::max(std::abs(peaks[0].alpha - upper), std::abs(peaks[1].alpha - lower));
  const double dist = std::min(d_direct, d_swap);
  os << ", max distance " << dist;
  return {dist <= 0.5 && min_w >= -1e-6, os.str()};
}

Verdict polaron() {
  const PhysicalParams p = testing::bistable_params(0.0);
  const double dev = polaron_check(p, {6, 40});
  std::ostringstream os;
  os << "deviation " << dev << " = " << dev / p.omega_m << " omega_m";
  return {dev <= 1e-6 * p.omega_m, os.str()};
}

Verdict optical_damping_at_nc() {
  bool ok = true;
  std::ostringstream os;
  for (auto [y, w, q] : {std::tuple{0.1, 10.0, 1e5}, std::tuple{1.5, 0.1, 1e3}}) {
    const double lc = critical_occupation(y, w, q);
    const PhysicalParams p = from_dimensionless({1e-3, y, mean_field_polynomial(lc, y, 0.0), w, q});
    const OpticalDamping d = optical_damping(branch_state(p, lc, BranchIndex::Upper), p);
    const double ratio = std::abs(d.gamma_tot) / p.gamma_m;
    ok = ok && ratio < 0.2;
    os << "omega_m/kappa=" << w << ": |gamma_tot|/gamma_m=" << ratio << "; ";
  }
  return {ok, os.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"threshold constants", threshold_constants},
      {"root-set oracle", root_oracle},
      {"stability cross-validation", stability_cross_validation},
      {"critical values", critical_values},
      {"region order", region_order},
      {"linear limit", linear_limit},
      {"bistable steady states", bistable_steady_states},
      {"Wigner two lobes", wigner_two_lobes},
      {"polaron equivalence", polaron},
      {"optical damping at n_c", optical_damping_at_nc},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!v.pass) ++failed;
    std::printf("%s %2zu %s [%.1fs]: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs,
                v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
