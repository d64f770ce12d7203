#include "kerrmech/semiclassical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace kerrmech {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Relative width of the discriminant band treated as a double root.
constexpr double kDegenerateBand = 1e-12;
constexpr double kNeutral = 1e-12;

double polish(double x, double y, double z) {
  for (int it = 0; it < 4; ++it) {
    const double f = mean_field_polynomial(x, y, z);
    const double df = mean_field_polynomial_derivative(x, y);
    if (f == 0.0 || std::abs(df) < 1e-300) break;
    const double next = x - f / df;
    if (std::abs(mean_field_polynomial(next, y, z)) >= std::abs(f)) break;
    x = next;
  }
  return x;
}

}  // namespace

const char* to_string(BranchIndex b) {
  switch (b) {
    case BranchIndex::Lower: return "lower";
    case BranchIndex::Middle: return "middle";
    case BranchIndex::Upper: return "upper";
    case BranchIndex::Only: return "only";
  }
  return "?";
}

const char* to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::UnstableC1: return "unstable_c1";
    case Stability::UnstableC2: return "unstable_c2";
  }
  return "?";
}

const char* to_string(Region r) {
  switch (r) {
    case Region::I: return "I";
    case Region::II: return "II";
    case Region::III: return "III";
    case Region::IV: return "IV";
  }
  return "?";
}

double mean_field_polynomial(double lam, double y, double z) {
  return ((4.0 * lam - 4.0 * y) * lam + (y * y + 0.25)) * lam - z;
}

double mean_field_polynomial_derivative(double lam, double y) {
  return (12.0 * lam - 8.0 * y) * lam + (y * y + 0.25);
}

std::vector<double> mean_field_roots(double y, double z) {
  if (!std::isfinite(y) || !std::isfinite(z)) {
    throw ParameterError("mean_field_roots: y and z must be finite");
  }
  if (z < 0.0) throw ParameterError("mean_field_roots: z must be >= 0");
  // 4 lam^2 - 4 y lam + y^2 + 1/4 has discriminant -4, so z = 0 is empty.
  if (z == 0.0) return {0.0};

  // Monic form lam^3 + a lam^2 + b lam + c.
  const double a = -y;
  const double b = (y * y + 0.25) / 4.0;
  const double c = -z / 4.0;
  const double shift = -a / 3.0;
  const double q = (a * a - 3.0 * b) / 9.0;
  const double r = (a * (2.0 * a * a - 9.0 * b) + 27.0 * c) / 54.0;
  const double r2 = r * r;
  const double q3 = q * q * q;
  const double scale = std::max({r2, std::abs(q3), std::numeric_limits<double>::min()});

  std::vector<double> roots;
  if (std::abs(r2 - q3) <= kDegenerateBand * scale) {
    // Fold boundary: keep the simple root only.
    if (q <= 0.0) {
      roots.push_back(shift);
    } else {
      const double sq = std::sqrt(q);
      roots.push_back(-2.0 * std::copysign(sq, r) + shift);
    }
  } else if (r2 < q3) {
    const double sq = std::sqrt(q);
    const double theta = std::acos(std::clamp(r / (sq * sq * sq), -1.0, 1.0));
    constexpr double two_pi = 2.0 * std::numbers::pi;
    roots = {-2.0 * sq * std::cos(theta / 3.0) + shift,
             -2.0 * sq * std::cos((theta + two_pi) / 3.0) + shift,
             -2.0 * sq * std::cos((theta - two_pi) / 3.0) + shift};
  } else {
    const double big = -std::copysign(std::cbrt(std::abs(r) + std::sqrt(r2 - q3)), r);
    const double small = big != 0.0 ? q / big : 0.0;
    roots.push_back(big + small + shift);
  }
  for (double& x : roots) x = polish(x, y, z);
  std::sort(roots.begin(), roots.end());
  return roots;
}

std::vector<BranchIndex> assign_branches(double y, const std::vector<double>& roots) {
  if (roots.size() == 3) {
    return {BranchIndex::Lower, BranchIndex::Middle, BranchIndex::Upper};
  }
  std::vector<BranchIndex> out(roots.size(), BranchIndex::Only);
  const auto window = bistability_window(y);
  if (!window || y <= kThresholdY) return out;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (roots[i] >= window->lam_plus) {
      out[i] = BranchIndex::Upper;
    } else if (roots[i] <= window->lam_minus) {
      out[i] = BranchIndex::Lower;
    }
  }
  return out;
}

std::optional<BistabilityWindow> bistability_window(double y) {
  constexpr double ty2 = 0.75;  // threshold_y^2
  if (!(y >= kThresholdY)) return std::nullopt;
  const double d = std::max(0.0, y * y - ty2);
  const double root = std::sqrt(d);
  BistabilityWindow w;
  const double base = y * (y * y + 3.0 * ty2);
  const double fold = d * root;
  w.z_minus = (base - fold) / 27.0;
  w.z_plus = (base + fold) / 27.0;
  w.lam_minus = (2.0 * y - root) / 6.0;
  w.lam_plus = (2.0 * y + root) / 6.0;
  return w;
}

// ---------------------------------------------------------------------------

RhCoefficients rh_coefficients(double g_sq, double delta, double omega_m, double kappa,
                               double gamma_m) {
  // Evaluated in extended precision: c2 is a difference of large terms near
  // the parametric threshold.
  using ld = long double;
  const ld g2 = g_sq, d = delta, w = omega_m, k = kappa, gm = gamma_m;
  const ld d2 = d * d, w2 = w * w, kg = k + gm, kg2 = kg * kg;
  const ld c1 = 4.0L * g2 * d + w * (d2 + k * k / 4.0L);
  const ld diff = d2 - w2;
  const ld c2 = k * gm * (diff * diff + 0.5L * (d2 + w2) * kg2 + kg2 * kg2 / 16.0L) -
                4.0L * g2 * d * w * kg2;
  return {static_cast<double>(c1), static_cast<double>(c2)};
}

RhCoefficients rh_coefficients(const MeanFieldBranch& b, const PhysicalParams& p) {
  return rh_coefficients(std::norm(b.g_eff), b.delta_eff, p.omega_m, p.kappa, p.gamma_m);
}

RhCoefficients rh_coefficients_scaled(double lam, double y, double sideband, double q_m) {
  return rh_coefficients(sideband * lam, 2.0 * lam - y, sideband, 1.0, sideband / q_m);
}

Stability classify(const RhCoefficients& c) {
  if (c.c1 <= kNeutral) return Stability::UnstableC1;
  if (c.c2 <= kNeutral) return Stability::UnstableC2;
  return Stability::Stable;
}

Stability classify_branch(const MeanFieldBranch& b) { return classify({b.c1, b.c2}); }

Stability classify_branch_kerr(const MeanFieldBranch& b) {
  return b.c1 <= kNeutral ? Stability::UnstableC1 : Stability::Stable;
}

MeanFieldBranch branch_state(const PhysicalParams& p, double lam, BranchIndex index) {
  validate(p);
  if (!std::isfinite(lam) || lam < 0.0) {
    throw ParameterError("branch_state: lambda must be finite and >= 0");
  }
  MeanFieldBranch b;
  b.lam = lam;
  b.branch_index = index;
  if (p.g0 == 0.0) {
    // Linear cavity: the only state is the Lorentzian response.
    if (lam != 0.0) throw ParameterError("branch_state: g0 = 0 admits only lambda = 0");
    b.a_bar = p.eps / cplx(-p.kappa / 2.0, p.delta0);
    b.nbar = std::norm(b.a_bar);
    b.delta_eff = p.delta0;
  } else {
    const DimensionlessParams d = to_dimensionless(p);
    const double resid = mean_field_polynomial(lam, d.y, d.z);
    if (std::abs(resid) > 1e-8 * std::max(1.0, d.z)) {
      std::ostringstream os;
      os << "branch_state: lambda = " << lam << " is not a mean-field root (residual "
         << resid << ")";
      throw ParameterError(os.str());
    }
    b.nbar = lam / d.chi;
    const double phi = std::atan(4.0 * lam - 2.0 * d.y);
    b.a_bar = -std::polar(std::sqrt(b.nbar), phi);
    b.b_bar = cplx(0.0, p.g0 * b.nbar) / cplx(p.gamma_m / 2.0, p.omega_m);
    b.delta_eff = p.delta0 + 2.0 * b.nbar * p.g0 * p.g0 / p.omega_m;
  }
  b.g_eff = p.g0 * b.a_bar;
  const RhCoefficients c = rh_coefficients(b, p);
  b.c1 = c.c1;
  b.c2 = c.c2;
  b.stability = classify_branch(b);
  return b;
}

std::vector<MeanFieldBranch> solve_branches(const PhysicalParams& p) {
  if (p.g0 == 0.0) return {branch_state(p, 0.0, BranchIndex::Only)};
  const DimensionlessParams d = to_dimensionless(p);
  const auto roots = mean_field_roots(d.y, d.z);
  const auto labels = assign_branches(d.y, roots);
  std::vector<MeanFieldBranch> out;
  out.reserve(roots.size());
  for (std::size_t i = 0; i < roots.size(); ++i) {
    out.push_back(branch_state(p, roots[i], labels[i]));
  }
  return out;
}

Eigen::Matrix4cd drift_matrix(const MeanFieldBranch& b, const PhysicalParams& p) {
  const cplx i(0.0, 1.0);
  const cplx g = b.g_eff;
  const cplx gc = std::conj(g);
  const double k2 = p.kappa / 2.0;
  const double gm2 = p.gamma_m / 2.0;
  const double d = b.delta_eff;
  const double w = p.omega_m;
  Eigen::Matrix4cd a;
  a << k2 + i * d, 0.0, i * gc, i * gc,
       0.0, k2 - i * d, -i * g, -i * g,
       i * g, i * gc, gm2 - i * w, 0.0,
       -i * g, -i * gc, 0.0, gm2 + i * w;
  return a;
}

// ---------------------------------------------------------------------------

NcRegime select_regime(double sideband, double q_m) {
  const double gamma = sideband / q_m;
  if (sideband > 1.0) return gamma > 1.0 ? NcRegime::Ia : NcRegime::Ib_IIa;
  if (sideband > 1.0 / q_m) return NcRegime::IIb;
  return NcRegime::TinySideband;
}

NcEstimate nc_asymptotic(double y, double sideband, double q_m, NcRegime regime) {
  if (!(sideband > 0.0) || !(q_m > 0.0) || !std::isfinite(y)) {
    throw ParameterError("nc_asymptotic: need finite y and sideband, q_m > 0");
  }
  NcEstimate e;
  const double gamma = sideband / q_m;  // in kappa units
  auto warn_unless = [&](bool ok, const char* what) {
    if (!ok) e.warnings.emplace_back(what);
  };
  switch (regime) {
    case NcRegime::Ia:
      warn_unless(sideband > gamma && gamma > 1.0, "regime Ia expects omega_m > gamma_m > kappa");
      e.value = (y + std::sqrt(y * y + 2.0 * q_m * sideband)) / 4.0;
      break;
    case NcRegime::Ib_IIa:
      warn_unless(sideband > 1.0 && 1.0 > gamma, "regime Ib/IIa expects omega_m > kappa > gamma_m");
      e.value = (y + std::sqrt(y * y + 2.0 * sideband * sideband * sideband / q_m)) / 4.0;
      break;
    case NcRegime::IIb:
      warn_unless(1.0 > sideband && sideband > 1.0 / q_m,
                  "regime IIb expects 1 > omega_m/kappa > 1/Q_m");
      e.value = (y + std::sqrt(y * y + (1.0 / sideband) / (8.0 * q_m))) / 4.0;
      break;
    case NcRegime::TinySideband: {
      warn_unless(sideband < 1.0 / q_m, "tiny-sideband regime expects omega_m/kappa << 1/Q_m");
      const double qw = q_m * sideband;
      const double disc = qw * qw - 1.0 / (32.0 * y * y);
      if (!(y > 1.0 / (std::sqrt(32.0) * qw)) || disc < 0.0) {
        e.value = kInf;
        e.unconditionally_stable = true;
      } else {
        e.value = y * (0.5 + qw + std::sqrt(disc));
      }
      break;
    }
  }
  return e;
}

double critical_occupation(double y, double sideband, double q_m) {
  if (!std::isfinite(y) || !(sideband > 0.0) || !(q_m > 0.0) || !std::isfinite(sideband) ||
      !std::isfinite(q_m)) {
    throw ParameterError("critical_occupation: need finite y and sideband, q_m > 0");
  }
  auto c2 = [&](double lam) { return rh_coefficients_scaled(lam, y, sideband, q_m).c2; };

  const double lo = std::max(0.0, y / 2.0);
  const NcEstimate est = nc_asymptotic(y, sideband, q_m, select_regime(sideband, q_m));
  const double reach = std::isfinite(est.value) ? std::max(1.0, est.value) : 1.0;
  const double hi = lo + 10.0 * reach;

  const double f_lo = c2(lo);
  if (!std::isfinite(f_lo) || f_lo <= 0.0) {
    std::ostringstream os;
    os << "critical_occupation: c2 is not positive at the lower bound (c2 = " << f_lo << ")";
    throw BracketError(os.str());
  }

  // c2 is a quartic in lambda, so a fine scan finds the first sign change.
  constexpr int kScan = 4000;
  double a = lo;
  for (int k = 1; k <= kScan; ++k) {
    double b = lo + (hi - lo) * k / kScan;
    const double fb = c2(b);
    if (!std::isfinite(fb)) throw BracketError("critical_occupation: non-finite c2 in scan");
    if (fb <= 0.0) {
      for (int it = 0; it < 200 && b - a > 0.0; ++it) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        if (c2(mid) > 0.0) {
          a = mid;
        } else {
          b = mid;
        }
      }
      return 0.5 * (a + b);
    }
    a = b;
  }
  return kInf;
}

double critical_power(double y, double sideband, double q_m) {
  const double lam = critical_occupation(y, sideband, q_m);
  if (!std::isfinite(lam)) return kInf;
  return mean_field_polynomial(lam, y, 0.0);
}

Region region_classify(double y, double z, double sideband, double q_m) {
  const auto roots = mean_field_roots(y, z);
  const double upper = roots.back();
  const Stability s = classify(rh_coefficients_scaled(upper, y, sideband, q_m));
  if (roots.size() == 3) return s == Stability::Stable ? Region::II : Region::III;
  return s == Stability::Stable ? Region::I : Region::IV;
}

OpticalDamping optical_damping(const MeanFieldBranch& b, const PhysicalParams& p) {
  OpticalDamping out;
  const double g_sq = std::norm(b.g_eff);
  if (std::sqrt(g_sq) >= p.kappa) out.warnings.emplace_back("weak coupling requires |g| < kappa");
  if (p.gamma_m >= p.kappa) out.warnings.emplace_back("weak coupling requires gamma_m < kappa");
  auto chi_c = [&](double w) { return 1.0 / cplx(p.kappa / 2.0, -(b.delta_eff + w)); };
  const cplx sigma = cplx(0.0, -g_sq) * (chi_c(p.omega_m) - std::conj(chi_c(-p.omega_m)));
  out.gamma_opt = -2.0 * sigma.imag();
  out.gamma_tot = p.gamma_m + out.gamma_opt;
  return out;
}

}  // namespace kerrmech
