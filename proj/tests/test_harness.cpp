#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "kerrmech/harness.hpp"

using namespace kerrmech;

namespace {

const char* kBistable = R"(
[physical]
chi = 0.08
y = 1.5
sideband = 30
q_m = 300
[sweep]
z_min = 0.05
z_max = 0.5
z_count = 46
)";

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("configuration parsing") {
  const RunPlan plan = parse_config_text(kBistable);
  CHECK(plan.base.chi == 0.08);
  CHECK(plan.base.y == 1.5);
  CHECK_FALSE(plan.has_z);
  CHECK(plan.z_grid.size() == 46);
  CHECK(plan.z_grid.front() == 0.05);
  CHECK(plan.z_grid.back() == 0.5);
  CHECK_FALSE(plan.quantum.enabled);

  const RunPlan hot = parse_config_text("[physical]\nchi=0.08\ny=1.5\nz=0.2\nsideband=30\nq_m=300\nkT_over_omega_m=1\n");
  CHECK(hot.has_z);
  CHECK(hot.n_th == doctest::Approx(0.5819767068693265));
  const PhysicalParams p = hot.physical(1.5, 0.2);
  CHECK(p.g0 == doctest::Approx(std::sqrt(0.08 * 30.0)));
  CHECK(p.n_th == hot.n_th);

  const RunPlan dimful = parse_config_text("[physical]\ng0=1.549\nomega_m=30\nkappa=1\ngamma_m=0.1\ndelta0=-1.5\neps=1.8\n");
  CHECK(dimful.base.chi == doctest::Approx(1.549 * 1.549 / 30.0));
  CHECK(dimful.base.z == doctest::Approx(dimful.base.chi * 1.8 * 1.8));

  CHECK_THROWS_AS(parse_config_text("[physical]\nchi=0.08\ny=1.5\nbogus=1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[nonsense]\nx=1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[physical]\nchi=0.08\ny=abc\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[physical]\nchi=0.08\ny=1.5\ng0=1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[physical]\nchi=0.08\ny=1.5\nsideband=30\nq_m=300\n[quantum]\nn_b=1\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config("/nonexistent/kerrmech.ini"), ConfigError);
}

TEST_CASE("17-digit floats round trip") {
  for (double v : {0.1, 1.0 / 3.0, 92.08765432109876, 1e-300, -2.5e17, 0.0}) {
    const std::string s = format_double(v);
    CHECK(std::stod(s) == v);
  }
}

TEST_CASE("power sweep folds match the closed-form window") {
  const SweepResult r = sweep_power(parse_config_text(kBistable));
  CHECK(r.records.size() == 46);
  REQUIRE(r.folds.size() == 2);
  const auto w = bistability_window(1.5);
  CHECK(std::abs(r.folds[0] - w->z_minus) <= 1e-9);
  CHECK(std::abs(r.folds[1] - w->z_plus) <= 1e-9);
  for (const SweepRecord& rec : r.records) {
    const int n = static_cast<int>(mean_field_roots(1.5, rec.z).size());
    CHECK((rec.lam[0].has_value() + rec.lam[1].has_value() + rec.lam[2].has_value()) == n);
    CHECK_FALSE(rec.quantum.has_value());
  }
}

TEST_CASE("detuning sweep window at fixed power") {
  const RunPlan plan = parse_config_text(
      "[physical]\nchi=0.08\ny=1.5\nz=0.26\nsideband=30\nq_m=300\n[sweep]\ny_min=0.5\ny_max=3\ny_count=101\n");
  const SweepResult r = sweep_detuning(plan);
  REQUIRE(r.folds.size() == 2);
  for (double y : r.folds) {
    const auto w = bistability_window(y);
    REQUIRE(w);
    CHECK(std::min(std::abs(w->z_minus - 0.26), std::abs(w->z_plus - 0.26)) < 1e-9);
  }
}

TEST_CASE("region map covers all four regions") {
  RunPlan plan = parse_config_text(
      "[physical]\nchi=0.08\ny=1.5\nsideband=10\nq_m=1000\n"
      "[sweep]\ny_min=0.8\ny_max=2\ny_count=25\nz_min=0.05\nz_max=0.5\nz_count=46\nboundary_points=50\n");
  const RegionMap m = region_map(plan);
  CHECK(m.cells.size() == 25 * 46);
  std::set<Region> seen;
  for (const SweepRecord& c : m.cells) seen.insert(c.region);
  CHECK(seen.size() == 4);
  REQUIRE(m.boundaries.size() == 3);
  CHECK(m.boundaries[0].name == "z_minus");
  CHECK(m.boundaries[2].name == "z_c");
}

TEST_CASE("critical occupation surface") {
  const RunPlan plan = parse_config_text(
      "[physical]\nchi=0.08\ny=1.5\nsideband=30\nq_m=300\n"
      "[sweep]\nsideband_values=0.1,1,10,30\nq_m_values=10,300,1e5\n");
  const auto cells = nc_surface(plan);
  CHECK(cells.size() == 12);
  for (const NcCell& c : cells) {
    if (c.status == "ok") CHECK(c.ratio >= 1.0 - 1e-9);
    if (c.sideband == 30.0 && c.q_m == 300.0) CHECK(c.ratio == doctest::Approx(4.5).epsilon(0.10));
  }
}

TEST_CASE("CSV and JSON records") {
  RunPlan plan = parse_config_text(kBistable);
  plan.z_grid = {0.1, 0.26, 0.4};
  std::vector<SweepRecord> recs = sweep_power(plan).records;
  QuantumBlock q;
  q.photon_number = 1.25;
  q.amp_sq = 1.0;
  q.g2 = 1.0625;
  q.fidelity_vs_kerr = 0.999;
  q.dims = {6, 3};
  q.residual = 1e-12;
  recs[1].quantum = q;
  recs[2].quantum_error = "steady state failed";

  std::ostringstream csv;
  write_records_csv(csv, recs);
  const std::string text = csv.str();
  CHECK(text.substr(0, text.find('\n')) == kCsvHeader);
  CHECK(std::string(kCsvHeader) ==
        "y,z,chi,sideband,q_m,n_th,lam1,lam2,lam3,stab1,stab2,stab3,region,nq,amp2,g2,fid,na,nb,resid");

  std::istringstream in(text);
  const auto back = read_records_csv(in);
  REQUIRE(back.size() == recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(back[i].z == recs[i].z);
    CHECK(back[i].region == recs[i].region);
    for (int k = 0; k < 3; ++k) CHECK(back[i].lam[k] == recs[i].lam[k]);
  }
  REQUIRE(back[1].quantum);
  CHECK(back[1].quantum->g2 == 1.0625);
  CHECK(back[1].quantum->dims == FockConfig{6, 3});
  CHECK_FALSE(back[2].quantum);

  std::ostringstream js;
  write_records_json(js, recs);
  const auto j = nlohmann::json::parse(js.str());
  REQUIRE(j.is_array());
  REQUIRE(j.size() == 3);
  CHECK(j[1]["quantum"]["photon_number"].get<double>() == 1.25);
  CHECK(j[0]["quantum"].is_null());
  CHECK(j[2]["quantum_error"].get<std::string>() == "steady state failed");
  CHECK(j[1]["z"].get<double>() == 0.26);
}

TEST_CASE("quantum sweep is deterministic across worker counts") {
  RunPlan plan = parse_config_text(kBistable);
  plan.z_grid = {0.1, 0.26, 0.4};
  plan.quantum.enabled = true;
  plan.quantum.dims = {6, 3};
  plan.jobs = 1;
  std::ostringstream a, b;
  write_records_csv(a, sweep_power(plan).records);
  plan.jobs = 3;
  write_records_csv(b, sweep_power(plan).records);
  CHECK(a.str() == b.str());
}

TEST_CASE("failed quantum points are marked and the sweep continues") {
  RunPlan plan = parse_config_text(kBistable);
  plan.z_grid = {0.1, 0.2};
  plan.quantum.enabled = true;
  plan.quantum.dims = {40, 10};
  ::setenv("KERRMECH_MAX_LIOUVILLE_DIM", "100", 1);
  const SweepResult r = sweep_power(plan);
  ::unsetenv("KERRMECH_MAX_LIOUVILLE_DIM");
  REQUIRE(r.records.size() == 2);
  for (const SweepRecord& rec : r.records) {
    CHECK_FALSE(rec.quantum);
    REQUIRE(rec.quantum_error);
    CHECK(rec.lam[0].has_value());
  }
}

}
