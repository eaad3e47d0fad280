#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "hcantor/error.hpp"
#include "hcantor/experiments.hpp"

using namespace hcantor;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c = parse_config(R"(
[sequence]
kind = constant
values = 0.3333333333333333

[wos]
depth = 4

[campaign]
walkers = 30000
seed = 5

[statistics]
bootstrap_resamples = 20
local_dimension_samples = 1000
)");
  return c;
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("hcantor_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("experiment kinds round trip") {
  for (auto k : {ExperimentKind::Sample, ExperimentKind::Dims, ExperimentKind::Continuity,
                 ExperimentKind::Gap, ExperimentKind::Harnack, ExperimentKind::Delta,
                 ExperimentKind::OracleCompare}) {
    CHECK(parse_experiment_kind(to_string(k)) == k);
  }
  CHECK(to_string(ExperimentKind::OracleCompare) == "oracle-compare");
  CHECK_THROWS_AS(parse_experiment_kind("nope"), Error);
}

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse_config(R"(
# comment
[sequence]
kind = periodic
values = 0.2, 0.3
; another comment
[continuity]
deltas = 0.04, 0.01
pattern = constant-sign
control = false
[gap]
measure = uniform
[output]
plots = true
)");
  CHECK(c.sequence.kind == SequenceKind::Periodic);
  CHECK(c.sequence.values == std::vector<double>{0.2, 0.3});
  CHECK(c.continuity.deltas == std::vector<double>{0.04, 0.01});
  CHECK(c.continuity.pattern == PerturbationPattern::ConstantSign);
  CHECK_FALSE(c.continuity.control);
  CHECK(c.gap.synthetic_uniform);
  CHECK(c.output.plots);
  CHECK(c.wos.depth == 4);
  CHECK_THROWS_AS(parse_config("[wos]\nbogus = 1\n"), Error);
  CHECK_THROWS_AS(parse_config("[wos]\ndepth = four\n"), Error);
  CHECK_THROWS_AS(parse_config("depth = 3\n"), Error);
  CHECK_THROWS_AS(parse_config("[gap]\nmeasure = other\n"), Error);
}

TEST_CASE("config reference parses back to the defaults") {
  const std::string ref = config_reference();
  CHECK(ref.find("[oracle]") != std::string::npos);
  const ExperimentConfig parsed = parse_config(ref);
  CHECK(parsed.to_json() == ExperimentConfig{}.to_json());
}

TEST_CASE("validation runs before sampling") {
  ExperimentConfig c = small_config();
  c.harnack.k_max = 3;
  CHECK_THROWS_AS(c.validate(ExperimentKind::Harnack), Error);
  c.wos.depth = 5;
  CHECK_NOTHROW(c.validate(ExperimentKind::Harnack));
  c.oracle.walkers = 10;
  try {
    c.validate(ExperimentKind::OracleCompare);
    FAIL("expected the cost guard");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CostGuard);
  }
  ExperimentConfig cont = small_config();
  cont.continuity.deltas = {0.2};
  CHECK_THROWS_AS(cont.validate(ExperimentKind::Continuity), Error);
}

TEST_CASE("gap on the injected uniform measure is exactly zero") {
  ExperimentConfig c = small_config();
  c.gap.synthetic_uniform = true;
  const ExperimentResult r = run_gap_test(c);
  CHECK(r.json["metrics"]["gap"]["value"].get<double>() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.json["metrics"]["gap"]["sigma"].get<double>() == 0.0);
}

TEST_CASE("results are reproducible and every metric carries an uncertainty") {
  const ExperimentConfig c = small_config();
  const ExperimentResult a = run_dims(c);
  const ExperimentResult b = run_dims(c);
  CHECK(a.json["metrics"] == b.json["metrics"]);
  CHECK(a.side_tables == b.side_tables);
  const auto& dim = a.json["metrics"]["dimension"];
  CHECK(dim.contains("value"));
  CHECK(dim.contains("sigma"));
  CHECK(a.json.contains("timing"));
  CHECK(a.json["inputs"]["campaign"]["seed"] == "5");
}

TEST_CASE("analyses accept an existing table") {
  ExperimentConfig c = small_config();
  c.wos.depth = 5;
  const ExperimentResult s = run_sample(c);
  std::istringstream csv(s.side_tables.at(0).second);
  const CylinderMeasureTable table = CylinderMeasureTable::read_csv(csv);
  const ExperimentResult h1 = run_harnack_scan(c, table);
  const ExperimentResult h2 = run_harnack_scan(c);
  CHECK(h1.json["metrics"]["fit"] == h2.json["metrics"]["fit"]);
  const ExperimentResult d = run_delta_decay(c, table);
  CHECK(d.json["metrics"]["rows"].size() == 3);
  CHECK(d.json["verdicts"].contains("root_decreasing"));
  ExperimentConfig other = c;
  other.sequence.values = {0.25};
  CHECK_THROWS_AS(run_dims(other, table), Error);
  CHECK_THROWS_AS(run_experiment(ExperimentKind::Continuity, c, table), Error);
}

TEST_CASE("small end-to-end runs of every analysis") {
  ExperimentConfig c = small_config();
  c.wos.depth = 5;
  const ExperimentResult h = run_harnack_scan(c);
  CHECK(h.json["metrics"]["scans"].size() == 3);
  CHECK(h.json["metrics"]["fit"]["q_hat"].contains("ci"));
  CHECK(h.json["verdicts"].contains("q_hat_below_one"));

  ExperimentConfig cc = small_config();
  cc.sequence.values = {0.25};
  cc.continuity.deltas = {0.05, 0.02};
  cc.campaign.walkers = 4000;
  const ExperimentResult cont = run_continuity_sweep(cc);
  CHECK(cont.json["metrics"]["sweep"].size() == 3);
  CHECK(cont.json["verdicts"].contains("lipschitz_bounded"));

  ExperimentConfig oc = small_config();
  oc.sequence.values = {0.25};
  oc.wos.depth = 1;
  oc.campaign.walkers = 4000;
  oc.oracle.walkers = 4000;
  const ExperimentResult o = run_oracle_compare(oc);
  CHECK(o.json["metrics"]["max_abs_difference"]["value"].get<double>() < 0.05);
  CHECK(o.side_tables.size() == 2);
}

TEST_CASE("plots are a pure function of the result document") {
  ExperimentConfig c = small_config();
  c.wos.depth = 5;
  const ExperimentResult r = run_harnack_scan(c);
  const auto dir = scratch("plots");
  const auto written = write_result(r, dir.string(), true);
  CHECK(written.size() == 3);
  std::ifstream in(dir / "harnack.json");
  std::stringstream buf;
  buf << in.rdbuf();
  const nlohmann::json reloaded = nlohmann::json::parse(buf.str());
  const auto again = render_plots(reloaded);
  REQUIRE(again.size() == 1);
  std::ifstream svg(dir / again[0].first);
  std::stringstream svg_buf;
  svg_buf << svg.rdbuf();
  CHECK(svg_buf.str() == again[0].second);
  CHECK(again[0].second.rfind("<svg", 0) == 0);
  std::filesystem::remove_all(dir);
}
