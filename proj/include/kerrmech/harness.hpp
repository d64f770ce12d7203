#pragma once

// Run plans, parameter sweeps and record output for the command-line tool.

#include <array>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kerrmech/liouvillian.hpp"
#include "kerrmech/observables.hpp"
#include "kerrmech/semiclassical.hpp"

namespace kerrmech {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OutputFormat { Csv, Json };

struct QuantumSettings {
  bool enabled = false;
  FockConfig dims{30, 10};
  SolverMethod method = SolverMethod::Auto;
  int refinement_steps = 0;
  /// Also solve the Kerr system at equal bare parameters and report the
  /// fidelity of the optical state against it.
  bool kerr_twin = true;
};

struct OutputSettings {
  OutputFormat format = OutputFormat::Csv;
  std::string dir = ".";
  int wigner_points = 121;
  /// Half-width of the Wigner grid; sqrt(n_a) when absent.
  std::optional<double> wigner_extent;
};

struct RunPlan {
  DimensionlessParams base;  ///< z is meaningful only when has_z
  bool has_z = false;
  double kappa = 1.0;
  double n_th = 0.0;

  std::vector<double> z_grid;
  std::vector<double> y_grid;
  std::vector<double> sideband_grid;
  std::vector<double> q_m_grid;
  int boundary_points = 200;
  int jobs = 1;

  QuantumSettings quantum;
  OutputSettings output;
  std::vector<std::string> warnings;

  /// Physical parameters of the plan at the given (y, z).
  PhysicalParams physical(double y, double z) const;
};

/// Parses an INI-style file with sections [physical], [sweep], [quantum] and
/// [output]. Physical keys may be dimensionless (chi, y, z, sideband, q_m)
/// or dimensionful (g0, omega_m, gamma_m, delta0, eps, kappa), not both;
/// temperature is n_th or kT_over_omega_m. Throws ConfigError.
RunPlan parse_config(const std::string& path);
RunPlan parse_config_text(const std::string& text);

struct QuantumBlock {
  double photon_number = 0.0;
  double amp_sq = 0.0;  ///< |<a>|^2
  std::optional<double> g2;
  std::optional<double> fidelity_vs_kerr;
  std::optional<double> kerr_photon_number;
  std::optional<double> kerr_g2;
  FockConfig dims;
  double residual = 0.0;
  std::vector<std::string> warnings;
};

struct SweepRecord {
  double y = 0.0, z = 0.0, chi = 0.0, sideband = 0.0, q_m = 0.0, n_th = 0.0;
  /// Slots lower/middle/upper. A single root sits in the lower slot below
  /// the bistable window (or when there is none) and in the upper slot above.
  std::array<std::optional<double>, 3> lam;
  std::array<std::optional<Stability>, 3> stab;
  Region region = Region::I;
  std::optional<QuantumBlock> quantum;
  std::optional<std::string> quantum_error;
};

/// Semiclassical part of a record.
SweepRecord semiclassical_record(const RunPlan& plan, double y, double z);

struct QuantumPoint {
  QuantumBlock block;
  DensityMatrix rho_optical;  ///< optomechanical state with the mechanics traced out
  std::optional<DensityMatrix> rho_kerr;
};

/// Steady states of the optomechanical system (and its Kerr twin) at p.
/// Throws ResourceCapError, SteadyStateError or ParameterError.
QuantumPoint solve_quantum_point(const PhysicalParams& p, const QuantumSettings& q, long long cap);

struct SweepResult {
  std::vector<SweepRecord> records;
  /// Parameter values where the number of real roots changes, located by
  /// bisection to 1e-12 relative.
  std::vector<double> folds;
};

/// Records over plan.z_grid at fixed y, with the quantum block when enabled.
/// Failed quantum points carry quantum_error; the sweep continues.
SweepResult sweep_power(const RunPlan& plan);
/// Records over plan.y_grid at fixed z.
SweepResult sweep_detuning(const RunPlan& plan);

struct BoundaryCurve {
  std::string name;  ///< "z_minus", "z_plus" or "z_c"
  std::vector<std::array<double, 2>> points;  ///< (y, z)
};

struct RegionMap {
  std::vector<SweepRecord> cells;  ///< y-major over plan.y_grid x plan.z_grid
  std::vector<BoundaryCurve> boundaries;
};

RegionMap region_map(const RunPlan& plan);

struct NcCell {
  double sideband = 0.0;
  double q_m = 0.0;
  double chi_nc = 0.0;  ///< +inf when unconditionally stable
  double ratio = 0.0;   ///< n_c / n_Delta, +inf when unconditionally stable
  std::string status;   ///< "ok", "stable" or "bracket_error"
};

/// n_c / n_Delta over plan.sideband_grid x plan.q_m_grid at plan.base.y.
std::vector<NcCell> nc_surface(const RunPlan& plan);

/// Grid values: linear (count points from lo to hi) or logarithmic.
std::vector<double> linear_grid(double lo, double hi, int count);
std::vector<double> log_grid(double lo, double hi, int count);

/// 17 significant digits; parses back to the same double.
std::string format_double(double v);

inline constexpr const char* kCsvHeader =
    "y,z,chi,sideband,q_m,n_th,lam1,lam2,lam3,stab1,stab2,stab3,region,nq,amp2,g2,fid,na,nb,resid";

void write_records_csv(std::ostream& os, const std::vector<SweepRecord>& records);
void write_records_json(std::ostream& os, const std::vector<SweepRecord>& records);
void write_records(std::ostream& os, const std::vector<SweepRecord>& records, OutputFormat f);
/// Inverse of write_records_csv for the CSV columns.
std::vector<SweepRecord> read_records_csv(std::istream& is);

void write_wigner_csv(std::ostream& os, const WignerGrid& grid);
void write_boundaries_csv(std::ostream& os, const std::vector<BoundaryCurve>& curves);
void write_nc_surface(std::ostream& os, const std::vector<NcCell>& cells, OutputFormat f);

}  // namespace kerrmech
