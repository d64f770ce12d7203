#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "kerrmech/harness.hpp"

namespace kerrmech {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"physical",
       {"chi", "y", "z", "sideband", "q_m", "g0", "omega_m", "kappa", "gamma_m", "delta0", "eps",
        "n_th", "kT_over_omega_m"}},
      {"sweep",
       {"z_min", "z_max", "z_count", "z_values", "y_min", "y_max", "y_count", "y_values",
        "sideband_min", "sideband_max", "sideband_count", "sideband_values", "q_m_min", "q_m_max",
        "q_m_count", "q_m_values",
        "boundary_points", "jobs"}},
      {"quantum", {"enabled", "n_a", "n_b", "solver", "refinement_steps", "kerr_twin"}},
      {"output", {"format", "dir", "wigner_points", "wigner_extent"}},
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

class Section {
 public:
  Section(std::string name, const pt::ptree* tree) : name_(std::move(name)), tree_(tree) {}

  bool has(const std::string& key) const { return tree_ && tree_->find(key) != tree_->not_found(); }

  std::string text(const std::string& key) const { return trim(tree_->get<std::string>(key)); }

  double number(const std::string& key) const {
    const std::string s = text(key);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) fail(key, "'" + s + "' is not a number");
    if (!std::isfinite(v)) fail(key, "value must be finite");
    return v;
  }

  std::optional<double> maybe_number(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return number(key);
  }

  int integer(const std::string& key) const {
    const std::string s = text(key);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) fail(key, "'" + s + "' is not an integer");
    return v;
  }

  bool boolean(const std::string& key) const {
    const std::string s = text(key);
    if (s == "true" || s == "on" || s == "yes" || s == "1") return true;
    if (s == "false" || s == "off" || s == "no" || s == "0") return false;
    fail(key, "'" + s + "' is not a boolean");
  }

  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(text(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
      if (item.empty() || ec != std::errc() || ptr != item.data() + item.size() || !std::isfinite(v)) {
        fail(key, "'" + item + "' is not a finite number");
      }
      out.push_back(v);
    }
    return out;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& why) const {
    throw ConfigError("[" + name_ + "] " + key + ": " + why);
  }

 private:
  std::string name_;
  const pt::ptree* tree_;
};

// A grid from either <prefix>_values or the (<prefix>_min, _max, _count) triple.
std::vector<double> read_grid(const Section& s, const std::string& prefix, bool logarithmic) {
  const bool has_values = s.has(prefix + "_values");
  const bool has_range =
      s.has(prefix + "_min") || s.has(prefix + "_max") || s.has(prefix + "_count");
  if (has_values && has_range) {
    s.fail(prefix + "_values", "give either a value list or a min/max/count range, not both");
  }
  if (has_values) return s.list(prefix + "_values");
  if (!has_range) return {};
  for (const char* part : {"_min", "_max", "_count"}) {
    if (!s.has(prefix + part)) s.fail(prefix + part, "missing (range needs min, max and count)");
  }
  const double lo = s.number(prefix + "_min");
  const double hi = s.number(prefix + "_max");
  const int n = s.integer(prefix + "_count");
  if (n < 1) s.fail(prefix + "_count", "must be >= 1");
  if (logarithmic && !(lo > 0.0 && hi > 0.0)) s.fail(prefix + "_min", "log grid needs positive bounds");
  return logarithmic ? log_grid(lo, hi, n) : linear_grid(lo, hi, n);
}

void read_physical(const Section& s, RunPlan& plan) {
  static const char* const kDimensionless[] = {"chi", "y", "z", "sideband", "q_m"};
  static const char* const kDimensionful[] = {"g0", "omega_m", "gamma_m", "delta0", "eps"};
  bool any_less = false, any_ful = false;
  for (const char* k : kDimensionless) any_less = any_less || s.has(k);
  for (const char* k : kDimensionful) any_ful = any_ful || s.has(k);
  if (any_less && any_ful) {
    s.fail("chi", "mixes dimensionless (chi, y, z, sideband, q_m) and dimensionful keys");
  }
  plan.kappa = s.maybe_number("kappa").value_or(1.0);
  if (!(plan.kappa > 0.0)) s.fail("kappa", "must be > 0");

  if (any_ful) {
    for (const char* k : {"g0", "omega_m", "gamma_m", "delta0"}) {
      if (!s.has(k)) s.fail(k, "missing required key");
    }
    PhysicalParams p;
    p.g0 = s.number("g0");
    p.omega_m = s.number("omega_m");
    p.gamma_m = s.number("gamma_m");
    p.delta0 = s.number("delta0");
    p.kappa = plan.kappa;
    plan.has_z = s.has("eps");
    p.eps = s.maybe_number("eps").value_or(0.0);
    try {
      plan.warnings = validate(p);
      plan.base = to_dimensionless(p);
    } catch (const ParameterError& e) {
      throw ConfigError(std::string("[physical] ") + e.what());
    }
  } else {
    for (const char* k : {"chi", "y", "sideband", "q_m"}) {
      if (!s.has(k)) s.fail(k, "missing required key");
    }
    plan.base.chi = s.number("chi");
    plan.base.y = s.number("y");
    plan.base.sideband = s.number("sideband");
    plan.base.q_m = s.number("q_m");
    plan.has_z = s.has("z");
    plan.base.z = s.maybe_number("z").value_or(0.0);
    if (!(plan.base.chi > 0.0)) s.fail("chi", "must be > 0");
    if (!(plan.base.sideband > 0.0)) s.fail("sideband", "must be > 0");
    if (!(plan.base.q_m > 0.0)) s.fail("q_m", "must be > 0");
    if (!(plan.base.z >= 0.0)) s.fail("z", "must be >= 0");
    if (plan.base.q_m < 10.0) {
      plan.warnings.push_back("Q_m < 10: the mean-field elimination assumes Q_m >> 1");
    }
  }

  if (s.has("n_th") && s.has("kT_over_omega_m")) {
    s.fail("n_th", "give either n_th or kT_over_omega_m, not both");
  }
  if (s.has("n_th")) {
    plan.n_th = s.number("n_th");
    if (!(plan.n_th >= 0.0)) s.fail("n_th", "must be >= 0");
  } else if (s.has("kT_over_omega_m")) {
    const double kt = s.number("kT_over_omega_m");
    if (!(kt >= 0.0)) s.fail("kT_over_omega_m", "must be >= 0");
    plan.n_th = bose_occupation(kt);
  }
}

void read_sweep(const Section& s, RunPlan& plan) {
  plan.z_grid = read_grid(s, "z", false);
  plan.y_grid = read_grid(s, "y", false);
  plan.sideband_grid = read_grid(s, "sideband", true);
  plan.q_m_grid = read_grid(s, "q_m", true);
  for (double z : plan.z_grid) {
    if (!(z >= 0.0)) s.fail("z_values", "driving power must be >= 0");
  }
  for (double v : plan.sideband_grid) {
    if (!(v > 0.0)) s.fail("sideband_values", "must be > 0");
  }
  for (double v : plan.q_m_grid) {
    if (!(v > 0.0)) s.fail("q_m_values", "must be > 0");
  }
  if (s.has("boundary_points")) {
    plan.boundary_points = s.integer("boundary_points");
    if (plan.boundary_points < 2) s.fail("boundary_points", "must be >= 2");
  }
  if (s.has("jobs")) {
    plan.jobs = s.integer("jobs");
    if (plan.jobs < 1) s.fail("jobs", "must be >= 1");
  }
}

void read_quantum(const Section& s, RunPlan& plan) {
  QuantumSettings& q = plan.quantum;
  if (s.has("enabled")) q.enabled = s.boolean("enabled");
  if (s.has("n_a")) q.dims.n_a = s.integer("n_a");
  if (s.has("n_b")) q.dims.n_b = s.integer("n_b");
  if (q.dims.n_a < 2) s.fail("n_a", "must be >= 2");
  if (q.dims.n_b < 2) s.fail("n_b", "must be >= 2 for the optomechanical system");
  if (s.has("solver")) {
    const std::string m = s.text("solver");
    if (m == "auto") {
      q.method = SolverMethod::Auto;
    } else if (m == "direct") {
      q.method = SolverMethod::Direct;
    } else if (m == "iterative") {
      q.method = SolverMethod::Iterative;
    } else {
      s.fail("solver", "expected auto, direct or iterative");
    }
  }
  if (s.has("refinement_steps")) {
    q.refinement_steps = s.integer("refinement_steps");
    if (q.refinement_steps < 0) s.fail("refinement_steps", "must be >= 0");
  }
  if (s.has("kerr_twin")) q.kerr_twin = s.boolean("kerr_twin");
}

void read_output(const Section& s, RunPlan& plan) {
  OutputSettings& o = plan.output;
  if (s.has("format")) {
    const std::string f = s.text("format");
    if (f == "csv") {
      o.format = OutputFormat::Csv;
    } else if (f == "json") {
      o.format = OutputFormat::Json;
    } else {
      s.fail("format", "expected csv or json");
    }
  }
  if (s.has("dir")) o.dir = s.text("dir");
  if (s.has("wigner_points")) {
    o.wigner_points = s.integer("wigner_points");
    if (o.wigner_points < 3) s.fail("wigner_points", "must be >= 3");
  }
  if (s.has("wigner_extent")) {
    o.wigner_extent = s.number("wigner_extent");
    if (!(*o.wigner_extent > 0.0)) s.fail("wigner_extent", "must be > 0");
  }
}

RunPlan plan_from_tree(const pt::ptree& tree) {
  const auto& allowed = allowed_keys();
  for (const auto& [section, body] : tree) {
    if (!body.data().empty() && body.empty()) {
      throw ConfigError("key '" + section + "' outside of any section");
    }
    const auto it = allowed.find(section);
    if (it == allowed.end()) throw ConfigError("unknown section [" + section + "]");
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw ConfigError("[" + section + "] unknown key '" + key + "'");
      if (trim(value.data()).empty()) throw ConfigError("[" + section + "] " + key + ": empty value");
    }
  }
  auto section = [&](const char* name) {
    const auto opt = tree.get_child_optional(name);
    return Section(name, opt ? &*opt : nullptr);
  };
  if (!tree.get_child_optional("physical")) throw ConfigError("missing section [physical]");
  RunPlan plan;
  read_physical(section("physical"), plan);
  read_sweep(section("sweep"), plan);
  read_quantum(section("quantum"), plan);
  read_output(section("output"), plan);
  return plan;
}

}  // namespace

PhysicalParams RunPlan::physical(double y, double z) const {
  DimensionlessParams d = base;
  d.y = y;
  d.z = z;
  return from_dimensionless(d, n_th, kappa);
}

RunPlan parse_config_text(const std::string& text) {
  std::istringstream is(text);
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.message() + " (line " +
                      std::to_string(e.line()) + ")");
  }
  return plan_from_tree(tree);
}

RunPlan parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace kerrmech
