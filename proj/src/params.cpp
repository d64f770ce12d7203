#include "kerrmech/params.hpp"

#include <cmath>
#include <sstream>

namespace kerrmech {

namespace {

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) {
    throw ParameterError(std::string(name) + " must be finite");
  }
}

}  // namespace

std::vector<std::string> validate(const PhysicalParams& p) {
  require_finite(p.g0, "g0");
  require_finite(p.omega_m, "omega_m");
  require_finite(p.kappa, "kappa");
  require_finite(p.gamma_m, "gamma_m");
  require_finite(p.delta0, "delta0");
  require_finite(p.eps, "eps");
  require_finite(p.n_th, "n_th");
  if (p.kappa <= 0.0) throw ParameterError("kappa must be > 0");
  if (p.omega_m <= 0.0) throw ParameterError("omega_m must be > 0");
  if (p.gamma_m <= 0.0) throw ParameterError("gamma_m must be > 0");
  if (p.eps < 0.0) throw ParameterError("eps must be >= 0");
  if (p.n_th < 0.0) throw ParameterError("n_th must be >= 0");

  std::vector<std::string> warnings;
  if (p.quality_factor() < 10.0) {
    std::ostringstream os;
    os << "Q_m = " << p.quality_factor()
       << " < 10: mechanical damping model assumes Q_m >> 1";
    warnings.push_back(os.str());
  }
  return warnings;
}

DimensionlessParams to_dimensionless(const PhysicalParams& p) {
  validate(p);
  if (p.g0 == 0.0) throw ParameterError("g0 = 0 gives chi = 0; no dimensionless form");
  DimensionlessParams d;
  d.chi = p.g0 * p.g0 / (p.omega_m * p.kappa);
  d.y = -p.delta0 / p.kappa;
  const double e = p.eps / p.kappa;
  d.z = d.chi * e * e;
  d.sideband = p.omega_m / p.kappa;
  d.q_m = p.omega_m / p.gamma_m;
  return d;
}

PhysicalParams from_dimensionless(const DimensionlessParams& d, double n_th, double kappa) {
  if (!(d.chi > 0.0)) throw ParameterError("chi must be > 0");
  if (!(d.z >= 0.0)) throw ParameterError("z must be >= 0");
  if (!(d.sideband > 0.0)) throw ParameterError("sideband must be > 0");
  if (!(d.q_m > 0.0)) throw ParameterError("q_m must be > 0");
  PhysicalParams p;
  p.kappa = kappa;
  p.omega_m = d.sideband * kappa;
  p.gamma_m = p.omega_m / d.q_m;
  p.g0 = std::sqrt(d.chi * p.omega_m * kappa);
  p.delta0 = -d.y * kappa;
  p.eps = kappa * std::sqrt(d.z / d.chi);
  p.n_th = n_th;
  validate(p);
  return p;
}

double bose_occupation(double kT_over_omega_m) {
  if (!std::isfinite(kT_over_omega_m) || kT_over_omega_m < 0.0) {
    throw ParameterError("kT/omega_m must be finite and >= 0");
  }
  if (kT_over_omega_m == 0.0) return 0.0;
  return 1.0 / std::expm1(1.0 / kT_over_omega_m);
}

}  // namespace kerrmech
