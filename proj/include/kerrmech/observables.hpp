#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kerrmech/fock.hpp"

namespace kerrmech {

/// Tr[rho O].
cplx expect(const DensityMatrix& rho, const FockOperator& op);

/// <a^+a^+aa> / <a^+a>^2 of the optical mode; empty when <a^+a> <= 1e-9.
std::optional<double> g2_zero(const DensityMatrix& rho);

/// Traces out the mechanical mode. Requires n_b >= 1; the result has
/// dims (n_a, 0).
DensityMatrix partial_trace_optical(const DensityMatrix& rho);

/// Uhlmann fidelity Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)), in [0, 1].
/// Throws std::domain_error if either state has an eigenvalue below -1e-8.
double fidelity(const DensityMatrix& rho1, const DensityMatrix& rho2);

// Reference single-mode states on `levels` Fock levels (dims (levels, 0)).
// Truncated states are renormalized.
DensityMatrix fock_state(int levels, int n);
DensityMatrix coherent_state(int levels, cplx alpha);
DensityMatrix thermal_state(int levels, double mean_occupation);

/// rho_optical (x) rho_mechanical on dims (n_a, n_b); both factors must be
/// single-mode states.
DensityMatrix product_state(const DensityMatrix& optical, const DensityMatrix& mechanical);

struct WignerGridSpec {
  double re_min = -1.0, re_max = 1.0;
  double im_min = -1.0, im_max = 1.0;
  int n_re = 121, n_im = 121;
};

/// 121 x 121 points over |Re alpha|, |Im alpha| <= sqrt(n_a).
WignerGridSpec default_wigner_grid(int n_a);

struct WignerGrid {
  std::vector<double> re_axis;
  std::vector<double> im_axis;
  /// values(i, j) = W(re_axis[i] + i im_axis[j]).
  Eigen::MatrixXd values;
  std::vector<std::string> warnings;

  double cell_area() const;
  /// Riemann sum of W over the grid.
  double integral() const;
};

/// Wigner function W(alpha) = (2/pi) Tr[rho D(alpha) P D(alpha)^+] of an
/// optical-only state, with P the photon-number parity. Normalized so that
/// its phase-space integral is 1. Warns when more than 1e-3 of the mass lies
/// outside the grid. Grid rows are evaluated on up to `jobs` threads.
WignerGrid wigner(const DensityMatrix& rho, const WignerGridSpec& spec, int jobs = 1);

struct LobeWeights {
  double lower = 0.0;
  double upper = 0.0;
  std::vector<std::string> warnings;
};

/// Integrates W over the two halves of the Voronoi split between the
/// centers. Warns when the centers are closer than one phase-space unit.
LobeWeights lobe_weights(const WignerGrid& w, cplx lower_center, cplx upper_center);

struct WignerPeak {
  cplx alpha;
  double value = 0.0;
};

/// Strict local maxima over the 8-neighborhood (interior points only) with
/// W >= rel_threshold * max W, sorted by decreasing value.
std::vector<WignerPeak> local_maxima(const WignerGrid& w, double rel_threshold);

}  // namespace kerrmech

namespace kerrmech {

enum class Observable { PhotonNumber, AmplitudeSquared, G2, MechanicalOccupation };
const char* to_string(Observable o);

/// <a^+a>, |<a>|^2, g2(0) or <b^+b> (0 without a mechanical mode). Throws
/// std::domain_error for g2 of a vacuum-dominated state.
double measure(const DensityMatrix& rho, Observable o);

}  // namespace kerrmech
