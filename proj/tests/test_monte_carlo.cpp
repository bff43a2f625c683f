#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tarlm/monte_carlo.hpp"
#include "test_util.hpp"

using namespace tarlm;

namespace {

ExperimentDesign small_null_design(std::uint64_t seed) {
  ExperimentDesign d;
  d.dgp = ARParams{0.0, {0.3}, 1.0};
  d.n = 60;
  d.mc_reps = 24;
  d.bootstrap_B = 29;
  d.order_policy = OrderPolicy::fixed(1);
  d.test_kind = TestKind::kBootstrap;
  d.seed = RngSeed{seed, 0};
  d.label = "phi1=0.3";
  return d;
}

}  // namespace

TEST_CASE("a single replicate gives a 0 or 100 percent rate") {
  ExperimentDesign d = small_null_design(10);
  d.mc_reps = 1;
  const RejectionTable table = run_size_experiment({d});
  REQUIRE(table.rows.size() == 1);
  REQUIRE(table.rows[0].slmb_rate.has_value());
  const double rate = *table.rows[0].slmb_rate;
  CHECK((rate == 0.0 || rate == 100.0));
}

TEST_CASE("tables are bitwise reproducible and thread-count independent") {
  ExperimentDesign d = small_null_design(11);
  const std::string a = run_size_experiment({d}, 1).to_csv();
  const std::string b = run_size_experiment({d}, 1).to_csv();
  const std::string c = run_size_experiment({d}, 4).to_csv();
  CHECK(a == b);
  CHECK(a == c);
}

TEST_CASE("size experiments demand a null DGP") {
  ExperimentDesign d = small_null_design(12);
  TARParams tar;
  tar.base = ARParams{0.0, {0.3}, 1.0};
  tar.delta_intercept = 0.5;
  tar.delta_coeffs = {0.5};
  d.dgp = tar;
  CHECK_THROWS_AS(run_size_experiment({d}), std::invalid_argument);
}

TEST_CASE("order-selection runner matches the size runner when order is fixed") {
  ExperimentDesign d = small_null_design(13);
  const std::string via_size = run_size_experiment({d}).to_csv();
  const std::string via_order = run_order_selection_experiment({d}).to_csv();
  CHECK(via_size == via_order);
}

TEST_CASE("power experiment self-calibrates at the null") {
  ExperimentDesign null_d = small_null_design(14);
  null_d.mc_reps = 200;
  null_d.bootstrap_B = 99;
  TARParams null_dgp;
  null_dgp.base = ARParams{0.0, {0.3}, 1.0};
  null_dgp.delta_intercept = 0.0;
  null_dgp.delta_coeffs = {0.0};
  null_dgp.threshold = 0.0;
  null_dgp.delay = 1;
  null_d.dgp = null_dgp;
  null_d.label = "psi=0";

  TARParams alt_dgp = null_dgp;
  alt_dgp.delta_intercept = 0.6;
  alt_dgp.delta_coeffs = {0.6};
  ExperimentDesign alt = null_d;
  alt.dgp = alt_dgp;
  alt.label = "psi=0.6";

  const RejectionTable table =
      run_power_experiment(null_d, {null_d, alt}, 2);
  REQUIRE(table.rows.size() == 2);
  REQUIRE(table.rows[0].slmb_corrected.has_value());

  // The psi=0 row reuses the null streams, so its corrected rate sits at the
  // nominal level up to p-value discreteness.
  CHECK(std::fabs(*table.rows[0].slmb_corrected - 5.0) <= 2.0);
  // And the real alternative dominates it.
  CHECK(*table.rows[1].slmb_corrected > *table.rows[0].slmb_corrected);
}

TEST_CASE("power experiment rejects a non-null null design") {
  ExperimentDesign bad = small_null_design(15);
  TARParams tar;
  tar.base = ARParams{0.0, {0.3}, 1.0};
  tar.delta_intercept = 0.4;
  tar.delta_coeffs = {0.0};
  bad.dgp = tar;
  CHECK_THROWS_AS(run_power_experiment(bad, {bad}), std::invalid_argument);
}

TEST_CASE("config parsing round-trips a size experiment") {
  const std::string text = R"({
    "experiment": "size",
    "name": "toy",
    "seed": 99,
    "mc_reps": 8,
    "B": 19,
    "order": {"policy": "fixed", "p": 1},
    "n": [60],
    "designs": [
      {"label": "phi1=0", "phi0": 0.0, "phi": [0.0]},
      {"label": "phi1=0.3", "phi0": 0.0, "phi": [0.3]}
    ]
  })";
  const ExperimentConfig cfg = parse_experiment_config(text);
  CHECK(cfg.kind == "size");
  CHECK(cfg.name == "toy");
  REQUIRE(cfg.designs.size() == 2);
  CHECK(cfg.designs[0].label == "phi1=0");
  CHECK(cfg.designs[0].n == 60);
  CHECK(cfg.designs[0].bootstrap_B == 19);

  const ExperimentRun run = run_experiment(cfg, 2);
  CHECK(run.name == "toy");
  CHECK(run.table.rows.size() == 2);
  const ExperimentRun again = run_experiment(cfg, 1);
  CHECK(run.table.to_csv() == again.table.to_csv());
}

TEST_CASE("config errors carry the offending key") {
  CHECK_THROWS_WITH_AS(parse_experiment_config("{}"),
                       doctest::Contains("$.experiment"), ConfigError);

  const std::string no_designs = R"({
    "experiment": "size", "seed": 1, "mc_reps": 4,
    "order": {"policy": "fixed", "p": 1}, "n": [60], "designs": []
  })";
  CHECK_THROWS_WITH_AS(parse_experiment_config(no_designs),
                       doctest::Contains("$.designs"), ConfigError);

  const std::string bad_policy = R"({
    "experiment": "order_selection", "seed": 1, "mc_reps": 4,
    "order": {"policy": "fixed", "p": 1}, "n": [60],
    "designs": [{"phi0": 0, "phi": [0.0]}]
  })";
  CHECK_THROWS_WITH_AS(parse_experiment_config(bad_policy),
                       doctest::Contains("$.order.policy"), ConfigError);

  CHECK_THROWS_AS(parse_experiment_config("not json"), ConfigError);
}

TEST_CASE("power config expands alternatives per sample size") {
  const std::string text = R"({
    "experiment": "power",
    "name": "power_toy",
    "seed": 7,
    "mc_reps": 12,
    "B": 19,
    "order": {"policy": "fixed", "p": 1},
    "n": [50, 60],
    "null": {"phi0": -0.1, "phi": [-0.8], "delta0": 0.0, "delta": [0.0]},
    "alts": [
      {"label": "psi=0.9", "phi0": -0.1, "phi": [-0.8],
       "delta0": 0.9, "delta": [0.9]}
    ]
  })";
  const ExperimentConfig cfg = parse_experiment_config(text);
  REQUIRE(cfg.null_design.has_value());
  REQUIRE(cfg.alt_designs.size() == 1);
  const ExperimentRun run = run_experiment(cfg, 2);
  CHECK(run.table.rows.size() == 2);  // one psi=0.9 row per n
  CHECK(run.table.rows[0].n == 50);
  CHECK(run.table.rows[1].n == 60);
}

TEST_CASE("bundled experiment configs parse") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::path(TARLM_SOURCE_DIR) / "configs";
  const struct {
    const char* file;
    const char* kind;
  } expected[] = {
      {"table1.toy.cfg", "size"},
      {"table2.toy.cfg", "power"},
      {"table4.toy.cfg", "order_selection"},
  };
  for (const auto& [file, kind] : expected) {
    std::ifstream in(dir / file);
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const ExperimentConfig cfg = parse_experiment_config(buffer.str());
    CHECK(cfg.kind == kind);
    if (cfg.kind == "power") {
      CHECK(cfg.null_design.has_value());
      CHECK(!cfg.alt_designs.empty());
    } else {
      CHECK(!cfg.designs.empty());
    }
  }
}

TEST_CASE("csv rendering has the documented fixed header") {
  RejectionTable table;
  RejectionRow row;
  row.label = "demo";
  row.n = 50;
  row.mc_reps = 10;
  row.slmb_rate = 5.0;
  table.rows.push_back(row);
  const std::string csv = table.to_csv();
  CHECK(csv.rfind("label,n,mc_reps,failures,slmb_percent,slma_percent,"
                  "slmb_corrected_percent,slma_corrected_percent\n",
                  0) == 0);
  CHECK(csv.find("demo,50,10,0,5,,,\n") != std::string::npos);
}
