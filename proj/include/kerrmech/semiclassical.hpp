#pragma once

// Mean-field solutions of the driven optomechanical cavity (and its Kerr
// twin), linear stability of each branch, and the (y, z) region map.
//
// All "scaled" quantities are expressed through lambda = chi * nbar and use
// kappa = 1; functions taking PhysicalParams work in whatever rate units the
// caller used.

#include <array>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kerrmech/params.hpp"

namespace kerrmech {

using cplx = std::complex<double>;

/// Threshold detuning sqrt(3)/2 below which only one mean-field root exists.
inline constexpr double kThresholdY = 0.86602540378443864676;
/// Threshold driving power 1/(6 sqrt(3)).
inline constexpr double kThresholdZ = 0.096225044864937627;

enum class BranchIndex { Lower, Middle, Upper, Only };
enum class Stability { Stable, UnstableC1, UnstableC2 };
enum class Region { I, II, III, IV };

const char* to_string(BranchIndex b);
const char* to_string(Stability s);
const char* to_string(Region r);

struct MeanFieldBranch {
  double lam = 0.0;    ///< chi * nbar
  double nbar = 0.0;   ///< mean cavity occupation
  cplx a_bar;          ///< optical amplitude
  cplx b_bar;          ///< mechanical amplitude
  cplx g_eff;          ///< enhanced coupling g0 * a_bar
  double delta_eff = 0.0;
  BranchIndex branch_index = BranchIndex::Only;
  double c1 = 0.0;
  double c2 = 0.0;
  Stability stability = Stability::Stable;
};

// ---------------------------------------------------------------------------
// Cubic root equation

/// p(lambda) = 4 lambda^3 - 4 y lambda^2 + (y^2 + 1/4) lambda - z.
double mean_field_polynomial(double lam, double y, double z);
double mean_field_polynomial_derivative(double lam, double y);

/// Real roots of the mean-field cubic, ascending. Returns one or three roots.
/// At the fold boundaries (double root, within a relative 1e-12 band of the
/// discriminant) only the simple root is returned.
std::vector<double> mean_field_roots(double y, double z);

/// Branch labels for a root set at detuning y: Lower/Middle/Upper for three
/// roots; a single root is Lower or Upper when it continues one of those
/// branches (y above threshold), Only otherwise.
std::vector<BranchIndex> assign_branches(double y, const std::vector<double>& roots);

struct BistabilityWindow {
  double z_minus = 0.0;
  double z_plus = 0.0;
  double lam_minus = 0.0;  ///< chi * n_minus, end of the lower branch
  double lam_plus = 0.0;   ///< chi * n_plus, start of the upper branch
};

/// Closed-form fold points. Empty for y below the threshold sqrt(3)/2; at the
/// threshold both folds coincide.
std::optional<BistabilityWindow> bistability_window(double y);

// ---------------------------------------------------------------------------
// Branches and stability

/// Full mean-field state for a root lambda of the cubic built from p.
/// Fills c1, c2 and the stability verdict. Throws ParameterError for
/// lambda < 0 or when lambda is not a root for p.
MeanFieldBranch branch_state(const PhysicalParams& p, double lam, BranchIndex index);

/// All mean-field branches of p with their stability.
std::vector<MeanFieldBranch> solve_branches(const PhysicalParams& p);

struct RhCoefficients {
  double c1 = 0.0;
  double c2 = 0.0;
};

/// Routh-Hurwitz coefficients from the rates directly. |g|^2 is the squared
/// enhanced coupling, delta the effective detuning.
RhCoefficients rh_coefficients(double g_sq, double delta, double omega_m, double kappa,
                               double gamma_m);
RhCoefficients rh_coefficients(const MeanFieldBranch& b, const PhysicalParams& p);
/// Scaled form with kappa = 1: |g|^2 = sideband*lam, delta = 2 lam - y.
RhCoefficients rh_coefficients_scaled(double lam, double y, double sideband, double q_m);

/// Drift matrix of the linearized fluctuations in the basis (d^+, d, c^+, c).
/// The branch is stable iff every eigenvalue has a positive real part.
Eigen::Matrix4cd drift_matrix(const MeanFieldBranch& b, const PhysicalParams& p);

/// Verdict from (c1, c2); values within 1e-12 of zero count as unstable.
Stability classify(const RhCoefficients& c);
Stability classify_branch(const MeanFieldBranch& b);
/// The Kerr medium only has the c1 condition.
Stability classify_branch_kerr(const MeanFieldBranch& b);

// ---------------------------------------------------------------------------
// Parametric instability threshold

class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// chi * n_c: the smallest root of c2(lambda) = 0 above y/2. Returns +inf
/// when c2 stays positive over the whole search range. Throws BracketError
/// when the search cannot be bracketed (c2 not positive at y/2, non-finite
/// values).
double critical_occupation(double y, double sideband, double q_m);

enum class NcRegime { Ia, Ib_IIa, IIb, TinySideband };

struct NcEstimate {
  double value = 0.0;  ///< chi n_c, or chi n' for TinySideband; +inf if stable
  bool unconditionally_stable = false;
  std::vector<std::string> warnings;  ///< violated ordering conditions
};

/// Closed-form approximations of chi n_c in the four damping/sideband regimes.
NcEstimate nc_asymptotic(double y, double sideband, double q_m, NcRegime regime);

/// Regime whose ordering conditions match (sideband, q_m).
NcRegime select_regime(double sideband, double q_m);

/// z_c = p(chi n_c) + z; +inf when critical_occupation is +inf.
double critical_power(double y, double sideband, double q_m);

Region region_classify(double y, double z, double sideband, double q_m);

struct OpticalDamping {
  double gamma_opt = 0.0;
  double gamma_tot = 0.0;
  std::vector<std::string> warnings;
};

/// Optically induced mechanical damping from the optomechanical self-energy
/// at omega_m (weak-coupling result).
OpticalDamping optical_damping(const MeanFieldBranch& b, const PhysicalParams& p);

}  // namespace kerrmech
