#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace kerrmech {

/// Thrown when a parameter set violates a hard invariant (negative rates,
/// non-finite values, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dimensionful rates of one driven optomechanical cavity. All rates are
/// expressed in units of the cavity linewidth; `kappa` is normally 1.
struct PhysicalParams {
  double g0 = 0.0;       ///< single-photon coupling
  double omega_m = 1.0;  ///< mechanical frequency
  double kappa = 1.0;    ///< cavity decay rate
  double gamma_m = 0.0;  ///< mechanical decay rate
  double delta0 = 0.0;   ///< bare detuning omega_d - omega_c
  double eps = 0.0;      ///< drive amplitude
  double n_th = 0.0;     ///< thermal occupation of the mechanical bath

  double quality_factor() const { return omega_m / gamma_m; }
  double sideband() const { return omega_m / kappa; }
  /// Kerr coefficient g0^2/omega_m of the equivalent Kerr medium.
  double kerr_shift() const { return g0 * g0 / omega_m; }
};

struct DimensionlessParams {
  double chi = 0.0;       ///< g0^2 / (omega_m kappa)
  double y = 0.0;         ///< -delta0 / kappa
  double z = 0.0;         ///< chi (eps/kappa)^2
  double sideband = 0.0;  ///< omega_m / kappa
  double q_m = 0.0;       ///< omega_m / gamma_m
};

/// Checks the hard invariants and throws ParameterError on violation.
/// Soft validity conditions (Q_m >= 10) are returned as warning strings.
std::vector<std::string> validate(const PhysicalParams& p);

/// Requires g0 > 0 so that chi > 0.
DimensionlessParams to_dimensionless(const PhysicalParams& p);

/// Inverse of to_dimensionless for a given cavity linewidth. The drive phase
/// is fixed to a real positive eps.
PhysicalParams from_dimensionless(const DimensionlessParams& d, double n_th = 0.0,
                                  double kappa = 1.0);

/// Bose occupation [exp(omega_m / kT) - 1]^-1 for kT given in units of
/// omega_m. kT = 0 maps to 0.
double bose_occupation(double kT_over_omega_m);

}  // namespace kerrmech
