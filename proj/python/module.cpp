#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "kerrmech/convergence.hpp"
#include "kerrmech/harness.hpp"
#include "kerrmech/liouvillian.hpp"
#include "kerrmech/observables.hpp"
#include "kerrmech/semiclassical.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace kerrmech;

namespace {

SolverMethod parse_method(const std::string& m) {
  if (m == "auto") return SolverMethod::Auto;
  if (m == "direct") return SolverMethod::Direct;
  if (m == "iterative") return SolverMethod::Iterative;
  throw std::invalid_argument("method must be auto, direct or iterative");
}

// Optical-only state from a square array; validates the invariants.
DensityMatrix optical(const Eigen::MatrixXcd& m) {
  return DensityMatrix(FockConfig{static_cast<int>(m.rows()), 0}, m);
}

py::dict branch_dict(const MeanFieldBranch& b) {
  return py::dict("lam"_a = b.lam, "nbar"_a = b.nbar, "a_bar"_a = b.a_bar, "b_bar"_a = b.b_bar,
                  "delta_eff"_a = b.delta_eff, "branch"_a = to_string(b.branch_index), "c1"_a = b.c1,
                  "c2"_a = b.c2, "stability"_a = to_string(b.stability));
}

py::dict quantum_dict(const QuantumPoint& q) {
  const QuantumBlock& b = q.block;
  py::dict d("photon_number"_a = b.photon_number, "amp_sq"_a = b.amp_sq, "g2"_a = b.g2,
             "fidelity_vs_kerr"_a = b.fidelity_vs_kerr, "kerr_photon_number"_a = b.kerr_photon_number,
             "kerr_g2"_a = b.kerr_g2, "n_a"_a = b.dims.n_a, "n_b"_a = b.dims.n_b, "residual"_a = b.residual,
             "warnings"_a = b.warnings, "rho_optical"_a = q.rho_optical.matrix());
  d["rho_kerr"] = q.rho_kerr ? py::cast(q.rho_kerr->matrix()) : py::none();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Driven optomechanical cavity and its Kerr-medium equivalent";

  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<ResourceCapError>(m, "ResourceCapError", PyExc_MemoryError);
  py::register_exception<SteadyStateError>(m, "SteadyStateError", PyExc_RuntimeError);

  py::class_<PhysicalParams>(m, "PhysicalParams")
      .def(py::init<>())
      .def_readwrite("g0", &PhysicalParams::g0)
      .def_readwrite("omega_m", &PhysicalParams::omega_m)
      .def_readwrite("kappa", &PhysicalParams::kappa)
      .def_readwrite("gamma_m", &PhysicalParams::gamma_m)
      .def_readwrite("delta0", &PhysicalParams::delta0)
      .def_readwrite("eps", &PhysicalParams::eps)
      .def_readwrite("n_th", &PhysicalParams::n_th)
      .def("__repr__", [](const PhysicalParams& p) {
        std::ostringstream os;
        os << "PhysicalParams(g0=" << p.g0 << ", omega_m=" << p.omega_m << ", kappa=" << p.kappa
           << ", gamma_m=" << p.gamma_m << ", delta0=" << p.delta0 << ", eps=" << p.eps
           << ", n_th=" << p.n_th << ")";
        return os.str();
      });

  py::class_<DimensionlessParams>(m, "DimensionlessParams")
      .def(py::init([](double chi, double y, double z, double sideband, double q_m) {
             return DimensionlessParams{chi, y, z, sideband, q_m};
           }),
           "chi"_a, "y"_a, "z"_a, "sideband"_a, "q_m"_a)
      .def_readwrite("chi", &DimensionlessParams::chi)
      .def_readwrite("y", &DimensionlessParams::y)
      .def_readwrite("z", &DimensionlessParams::z)
      .def_readwrite("sideband", &DimensionlessParams::sideband)
      .def_readwrite("q_m", &DimensionlessParams::q_m);

  m.def("to_dimensionless", &to_dimensionless, "p"_a);
  m.def("from_dimensionless", &from_dimensionless, "d"_a, "n_th"_a = 0.0, "kappa"_a = 1.0);
  m.def("bose_occupation", &bose_occupation, "kT_over_omega_m"_a);

  // Mean field
  m.def("mean_field_roots", &mean_field_roots, "y"_a, "z"_a, "Real roots of the mean-field cubic, ascending.");
  m.def("bistability_window", [](double y) -> py::object {
    const auto w = bistability_window(y);
    if (!w) return py::none();
    return py::dict("z_minus"_a = w->z_minus, "z_plus"_a = w->z_plus, "lam_minus"_a = w->lam_minus,
                    "lam_plus"_a = w->lam_plus);
  }, "y"_a);
  m.def("solve_branches", [](const PhysicalParams& p) {
    py::list out;
    for (const MeanFieldBranch& b : solve_branches(p)) out.append(branch_dict(b));
    return out;
  }, "p"_a);
  m.def("critical_occupation", &critical_occupation, "y"_a, "sideband"_a, "q_m"_a);
  m.def("critical_power", &critical_power, "y"_a, "sideband"_a, "q_m"_a);
  m.def("region_classify", [](double y, double z, double sideband, double q_m) {
    return std::string(to_string(region_classify(y, z, sideband, q_m)));
  }, "y"_a, "z"_a, "sideband"_a, "q_m"_a);

  // Quantum
  m.def("polaron_check", [](const PhysicalParams& p, int n_a, int n_b) {
    return polaron_check(p, FockConfig{n_a, n_b});
  }, "p"_a, "n_a"_a, "n_b"_a);
  m.def("steady_state", [](const PhysicalParams& p, int n_a, int n_b, const std::string& method,
                           int refinement_steps) {
    const FockConfig dims{n_a, n_b};
    dims.validate();
    check_resource_cap(dims, max_liouville_dim());
    SteadyStateOptions opts;
    opts.method = parse_method(method);
    opts.refinement_steps = refinement_steps;
    SteadyState ss = [&] {
      py::gil_scoped_release release;
      return steady_state(build_liouvillian_for(p, dims), opts);
    }();
    return py::dict("rho"_a = ss.rho.matrix(), "residual"_a = ss.residual, "min_eigenvalue"_a = ss.min_eigenvalue,
                    "rcond"_a = ss.rcond, "method"_a = to_string(ss.method), "warnings"_a = ss.warnings);
  }, "p"_a, "n_a"_a, "n_b"_a = 0, "method"_a = "auto", "refinement_steps"_a = 0,
     "Steady state of the optomechanical system (n_b >= 2) or the Kerr medium (n_b = 0).");
  m.def("solve_quantum_point", [](const PhysicalParams& p, int n_a, int n_b, bool kerr_twin) {
    QuantumSettings q;
    q.enabled = true;
    q.dims = {n_a, n_b};
    q.kerr_twin = kerr_twin;
    const long long cap = max_liouville_dim();
    QuantumPoint pt = [&] {
      py::gil_scoped_release release;
      return solve_quantum_point(p, q, cap);
    }();
    return quantum_dict(pt);
  }, "p"_a, "n_a"_a, "n_b"_a, "kerr_twin"_a = true);

  // Observables on optical-only density matrices
  m.def("photon_number", [](const Eigen::MatrixXcd& rho) {
    return measure(optical(rho), Observable::PhotonNumber);
  }, "rho"_a);
  m.def("g2_zero", [](const Eigen::MatrixXcd& rho) { return g2_zero(optical(rho)); }, "rho"_a,
        "Second-order correlation at zero delay; None for a vacuum-dominated state.");
  m.def("fidelity", [](const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return fidelity(optical(a), optical(b));
  }, "rho1"_a, "rho2"_a);
  m.def("partial_trace_optical", [](const Eigen::MatrixXcd& rho, int n_a, int n_b) {
    return partial_trace_optical(DensityMatrix(FockConfig{n_a, n_b}, rho)).matrix();
  }, "rho"_a, "n_a"_a, "n_b"_a);
  m.def("coherent_state", [](int levels, cplx alpha) { return coherent_state(levels, alpha).matrix(); },
        "levels"_a, "alpha"_a);
  m.def("thermal_state", [](int levels, double n) { return thermal_state(levels, n).matrix(); },
        "levels"_a, "mean_occupation"_a);
  m.def("wigner", [](const Eigen::MatrixXcd& rho, std::optional<double> extent, int points, int jobs) {
    const DensityMatrix r = optical(rho);
    WignerGridSpec spec = default_wigner_grid(r.dims().n_a);
    if (extent) spec = {-*extent, *extent, -*extent, *extent, points, points};
    spec.n_re = spec.n_im = points;
    WignerGrid w = [&] {
      py::gil_scoped_release release;
      return wigner(r, spec, jobs);
    }();
    return py::make_tuple(w.re_axis, w.im_axis, w.values);
  }, "rho"_a, "extent"_a = py::none(), "points"_a = 121, "jobs"_a = 1,
     "Returns (re_axis, im_axis, W) with W[i, j] at re_axis[i] + 1j * im_axis[j].");

  // Configured sweeps, returned as CSV text
  m.def("run_sweep", [](const std::string& config_text, const std::string& kind) {
    const RunPlan plan = parse_config_text(config_text);
    std::ostringstream os;
    {
      py::gil_scoped_release release;
      if (kind == "power") {
        write_records_csv(os, sweep_power(plan).records);
      } else if (kind == "detuning") {
        write_records_csv(os, sweep_detuning(plan).records);
      } else if (kind == "regions") {
        write_records_csv(os, region_map(plan).cells);
      } else {
        throw std::invalid_argument("kind must be power, detuning or regions");
      }
    }
    return os.str();
  }, "config_text"_a, "kind"_a = "power");
  m.attr("CSV_HEADER") = kCsvHeader;
}
