// kerrmech command-line harness: mean-field branches, region maps, critical
// occupation maps, quantum steady states and Wigner grids.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "kerrmech/convergence.hpp"
#include "kerrmech/harness.hpp"

namespace fs = std::filesystem;
using namespace kerrmech;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

struct Flags {
  std::string config;
  std::string out;
  std::string format;
  int jobs = 0;
  std::string quantum;
};

void add_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "run configuration (INI)")->required();
  cmd->add_option("--out", f.out, "output directory (overrides [output] dir)");
  cmd->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--jobs", f.jobs, "parallel workers")->check(CLI::PositiveNumber);
  cmd->add_option("--quantum", f.quantum, "on or off")->check(CLI::IsMember({"on", "off"}));
}

RunPlan load_plan(const Flags& f) {
  RunPlan plan = parse_config(f.config);
  if (!f.out.empty()) plan.output.dir = f.out;
  if (!f.format.empty()) plan.output.format = f.format == "json" ? OutputFormat::Json : OutputFormat::Csv;
  if (f.jobs > 0) plan.jobs = f.jobs;
  if (!f.quantum.empty()) plan.quantum.enabled = f.quantum == "on";
  for (const auto& w : plan.warnings) std::cerr << "warning: " << w << '\n';
  return plan;
}

const char* extension(const RunPlan& plan) {
  return plan.output.format == OutputFormat::Json ? ".json" : ".csv";
}

std::ofstream open_output(const RunPlan& plan, const std::string& name) {
  fs::create_directories(plan.output.dir);
  const fs::path path = fs::path(plan.output.dir) / name;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

// Failures per point; warnings once per distinct message.
void report_quantum_errors(const std::vector<SweepRecord>& records) {
  std::vector<std::pair<std::string, int>> seen;
  for (const SweepRecord& r : records) {
    if (r.quantum_error) {
      std::cerr << "quantum solve failed at y=" << r.y << " z=" << r.z << ": " << *r.quantum_error << '\n';
    }
    if (!r.quantum) continue;
    for (const auto& w : r.quantum->warnings) {
      auto it = std::find_if(seen.begin(), seen.end(), [&](const auto& e) { return e.first == w; });
      if (it == seen.end()) {
        seen.emplace_back(w, 1);
      } else {
        ++it->second;
      }
    }
  }
  for (const auto& [w, count] : seen) {
    std::cerr << "warning: " << w;
    if (count > 1) std::cerr << " (" << count << " points)";
    std::cerr << '\n';
  }
}

// 3 when quantum solves were requested and none succeeded.
int quantum_status(const RunPlan& plan, const std::vector<SweepRecord>& records) {
  if (!plan.quantum.enabled || records.empty()) return 0;
  const bool all_failed = std::all_of(records.begin(), records.end(),
                                      [](const SweepRecord& r) { return !r.quantum.has_value(); });
  return all_failed ? kExitSolver : 0;
}

int run_branches(const RunPlan& plan) {
  if (!plan.z_grid.empty() && !plan.y_grid.empty()) {
    throw ConfigError("branches: give a z grid (power sweep) or a y grid (detuning sweep), not both");
  }
  const bool detuning = !plan.y_grid.empty();
  const SweepResult res = detuning ? sweep_detuning(plan) : sweep_power(plan);
  {
    auto os = open_output(plan, std::string("branches") + extension(plan));
    write_records(os, res.records, plan.output.format);
  }
  auto folds = open_output(plan, "folds.csv");
  folds << (detuning ? "y\n" : "z\n");
  for (double f : res.folds) folds << format_double(f) << '\n';
  report_quantum_errors(res.records);
  return quantum_status(plan, res.records);
}

int run_regions(const RunPlan& plan) {
  const RegionMap map = region_map(plan);
  {
    auto os = open_output(plan, std::string("regions") + extension(plan));
    write_records(os, map.cells, plan.output.format);
  }
  auto os = open_output(plan, "boundaries.csv");
  write_boundaries_csv(os, map.boundaries);
  return 0;
}

int run_ncmap(const RunPlan& plan) {
  auto os = open_output(plan, std::string("ncmap") + extension(plan));
  write_nc_surface(os, nc_surface(plan), plan.output.format);
  return 0;
}

int run_steady(RunPlan plan) {
  // [physical] z wins; otherwise every point of the z grid.
  if (plan.has_z) {
    plan.z_grid = {plan.base.z};
  } else if (plan.z_grid.empty()) {
    throw ConfigError("steady: needs [physical] z (or eps) or a z grid");
  }
  plan.quantum.enabled = true;
  const SweepResult res = sweep_power(plan);
  auto os = open_output(plan, std::string("steady") + extension(plan));
  write_records(os, res.records, plan.output.format);
  report_quantum_errors(res.records);
  return quantum_status(plan, res.records);
}

// z values for Wigner panels: the sweep grid, else [physical] z, else six
// evenly spaced points across the bistable window including its ends.
std::vector<double> wigner_z_values(const RunPlan& plan) {
  if (!plan.z_grid.empty()) return plan.z_grid;
  if (plan.has_z) return {plan.base.z};
  const auto w = bistability_window(plan.base.y);
  if (!w) throw ConfigError("wigner: no z given and y is below the bistability threshold");
  return linear_grid(w->z_minus, w->z_plus, 6);
}

// Mean-field amplitudes of the lower and upper branch, taken at z clamped
// into the bistable window.
std::optional<std::pair<cplx, cplx>> lobe_centers(const RunPlan& plan, double z) {
  const auto w = bistability_window(plan.base.y);
  if (!w) return std::nullopt;
  const double margin = 1e-9 * (w->z_plus - w->z_minus);
  const double zc = std::clamp(z, w->z_minus + margin, w->z_plus - margin);
  const PhysicalParams p = plan.physical(plan.base.y, zc);
  const auto roots = mean_field_roots(plan.base.y, zc);
  if (roots.size() != 3) return std::nullopt;
  return std::make_pair(branch_state(p, roots.front(), BranchIndex::Lower).a_bar,
                        branch_state(p, roots.back(), BranchIndex::Upper).a_bar);
}

int run_wigner(const RunPlan& plan) {
  const std::vector<double> zs = wigner_z_values(plan);
  const long long cap = max_liouville_dim();
  const double extent = plan.output.wigner_extent.value_or(std::sqrt(double(plan.quantum.dims.n_a)));
  const WignerGridSpec spec{-extent, extent, -extent, extent, plan.output.wigner_points,
                            plan.output.wigner_points};
  QuantumSettings q = plan.quantum;
  q.kerr_twin = false;
  auto summary = open_output(plan, "wigner_summary.csv");
  summary << "index,z,nq,integral,min_w,p_lower,p_upper,n_peaks\n";
  int failures = 0;
  for (std::size_t k = 0; k < zs.size(); ++k) {
    const double z = zs[k];
    try {
      const QuantumPoint qp = solve_quantum_point(plan.physical(plan.base.y, z), q, cap);
      const WignerGrid grid = wigner(qp.rho_optical, spec, plan.jobs);
      for (const auto& w : grid.warnings) std::cerr << "warning (z=" << z << "): " << w << '\n';
      {
        auto os = open_output(plan, "wigner_" + std::to_string(k) + ".csv");
        write_wigner_csv(os, grid);
      }
      std::string lower, upper;
      if (const auto c = lobe_centers(plan, z)) {
        const LobeWeights lw = lobe_weights(grid, c->first, c->second);
        lower = format_double(lw.lower);
        upper = format_double(lw.upper);
      }
      summary << k << ',' << format_double(z) << ',' << format_double(qp.block.photon_number) << ','
              << format_double(grid.integral()) << ',' << format_double(grid.values.minCoeff())
              << ',' << lower << ',' << upper << ',' << local_maxima(grid, 0.1).size() << '\n';
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      ++failures;
      std::cerr << "quantum solve failed at z=" << z << ": " << e.what() << '\n';
      summary << k << ',' << format_double(z) << ",,,,,,\n";
    }
  }
  return failures == static_cast<int>(zs.size()) ? kExitSolver : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optomechanical and Kerr bistability: mean-field and quantum steady states"};
  app.require_subcommand(1);
  Flags flags;
  struct Command {
    const char* name;
    const char* help;
  };
  const Command commands[] = {
      {"branches", "mean-field branches over a z grid (power) or y grid (detuning)"},
      {"regions", "region labels I-IV over a (y, z) grid plus boundary curves"},
      {"ncmap", "critical occupation n_c / n_Delta over (sideband, Q_m)"},
      {"steady", "quantum steady state of both systems at one point"},
      {"wigner", "optical Wigner grids of the optomechanical steady state"},
  };
  for (const Command& c : commands) add_flags(app.add_subcommand(c.name, c.help), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    const std::string cmd = app.get_subcommands().front()->get_name();
    const RunPlan plan = load_plan(flags);
    if (cmd == "branches") return run_branches(plan);
    if (cmd == "regions") return run_regions(plan);
    if (cmd == "ncmap") return run_ncmap(plan);
    if (cmd == "steady") return run_steady(plan);
    return run_wigner(plan);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParameterError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
