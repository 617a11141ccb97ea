#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>

#include <json.hpp>

#include "adaptcb/harness.hpp"

using namespace adaptcb;

namespace {

const char* kSmall = R"({
  "algorithm": "corral", "T": 100, "seeds": [1, 2],
  "env": {"kind": "linear_bandit", "d": 3, "action_count": 8, "noise": "uniform_band"},
  "params": {"reg_sq_scale": 0.5}, "per_round": true
})";

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("config parsing and defaults") {
  const ExperimentConfig c = parse_config(kSmall);
  CHECK(c.algorithm == AlgorithmKind::corral);
  CHECK(c.horizon == 100);
  CHECK(c.env.horizon == 100);
  CHECK(c.seeds == std::vector<std::uint64_t>{1, 2});
  CHECK(c.env.dim == 3);
  CHECK(c.env.noise == NoiseKind::uniform_band);
  CHECK(c.params.reg_sq_scale == 0.5);
  CHECK(c.params.eta == 0.5);
  // Round trip through the writer.
  const ExperimentConfig again = parse_config(config_to_json(c));
  CHECK(again.env.action_count == 8);
  CHECK(again.params.reg_sq_scale == 0.5);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config("{"), ConfigError);
  CHECK_THROWS_AS(parse_config("[]"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"algorithm": "ucb"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"seeds": []})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"T": "many"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"env": {"eps": 2.0}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"algorithm": "squarecb"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"params": {"selector": "softmax"}})"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("per-round CSV has one row per seed and round") {
  const ExperimentConfig c = parse_config(kSmall);
  std::ostringstream csv;
  const RunSummary s = run_experiment(c, &csv);
  const auto rows = lines(csv.str());
  REQUIRE(rows.size() == 201);
  CHECK(rows[0] == round_csv_header());
  CHECK(rows[1].rfind("1,1,", 0) == 0);
  CHECK(rows[200].rfind("2,100,", 0) == 0);
  CHECK(s.seeds.size() == 2);
  CHECK(s.bases == 4);
  // Last cum_regret of seed 2 matches its summary.
  const std::string last = rows[200];
  std::vector<std::string> cols;
  std::stringstream ls(last);
  std::string cell;
  while (std::getline(ls, cell, ',')) cols.push_back(cell);
  REQUIRE(cols.size() == 14);
  CHECK(std::stod(cols[10]) == s.seeds[1].final_regret);
}

TEST_CASE("runs are deterministic and seeds do not interact") {
  ExperimentConfig c = parse_config(kSmall);
  c.per_round = false;
  const RunSummary a = run_experiment(c);
  const RunSummary b = run_experiment(c);
  CHECK(a.mean_regret == b.mean_regret);
  c.seeds = {2};
  const RunSummary only = run_experiment(c);
  CHECK(only.seeds[0].final_regret == a.seeds[1].final_regret);
}

TEST_CASE("every algorithm runs") {
  for (const char* cfg : {
           R"({"algorithm": "squarecb", "T": 50, "env": {"kind": "finite_arm", "K": 4}})",
           R"({"algorithm": "squarecb", "T": 50, "env": {"kind": "finite_arm", "K": 4},
               "params": {"selector": "log_barrier"}})",
           R"({"algorithm": "squarecb_lin", "T": 50, "env": {"d": 3}})",
           R"({"algorithm": "corral", "T": 50, "env": {"kind": "linear_contextual", "d": 2, "feature_dim": 2}})",
           R"({"algorithm": "corral_dim_adaptive", "T": 50,
               "env": {"d": 6, "action_gen": "low_dim_subspace", "subspace_schedule": [1, 3]}})",
           R"({"algorithm": "tsallis_mab", "T": 50, "env": {"kind": "finite_arm", "K": 3}})"}) {
    ExperimentConfig c = parse_config(cfg);
    c.per_round = false;
    const RunSummary s = run_experiment(c);
    CHECK(s.seeds.size() == 1);
    CHECK(s.seeds[0].final_regret >= 0.0);
    CHECK(s.seeds[0].budgets_respected);
  }
}

TEST_CASE("doubles are written with 17 significant digits") {
  const double x = 0.1 + 0.2;
  CHECK(format_double(x) == "0.30000000000000004");
  CHECK(std::stod(format_double(M_PI)) == M_PI);
  RoundRow row;
  row.q = 1.0 / 3.0;
  const std::string line = round_csv_line(row);
  CHECK(line.find("0.33333333333333331") != std::string::npos);
}

TEST_CASE("summary JSON") {
  ExperimentConfig c = parse_config(kSmall);
  c.per_round = false;
  const RunSummary s = run_experiment(c);
  const auto j = nlohmann::json::parse(summary_to_json(s));
  CHECK(j.contains("mean_regret"));
  CHECK(j.at("mean_regret").get<double>() == s.mean_regret);
  CHECK(j.at("seeds").size() == 2);
}

TEST_CASE("fits") {
  const LinearFit f = fit_line({1, 2, 3, 4}, {3, 5, 7, 9});
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.r2 == doctest::Approx(1.0));
  CHECK(loglog_slope({100, 400, 1600}, {10, 20, 40}) == doctest::Approx(0.5));
  CHECK_THROWS_AS(fit_line({1}, {1}), ConfigError);
  CHECK_THROWS_AS(loglog_slope({0, 1}, {1, 2}), ConfigError);
}

TEST_CASE("sweeps") {
  ExperimentConfig c = parse_config(kSmall);
  c.per_round = false;
  c.seeds = {1};
  CHECK(with_axis_value(c, SweepAxis::horizon, 60).env.horizon == 60);
  CHECK(with_axis_value(c, SweepAxis::eps, 0.1).env.eps == 0.1);
  CHECK(with_axis_value(c, SweepAxis::dim, 4).env.dim == 4);
  CHECK_THROWS_AS(with_axis_value(c, SweepAxis::horizon, 2.5), ConfigError);
  CHECK(parse_sweep_axis("T") == SweepAxis::horizon);
  CHECK_THROWS_AS(parse_sweep_axis("K"), ConfigError);
  CHECK_THROWS_AS(run_sweep(c, SweepAxis::eps, {}), ConfigError);
  CHECK_THROWS_AS(run_sweep(c, SweepAxis::eps, {0.2, 0.1}), ConfigError);
  const SweepResult s = run_sweep(c, SweepAxis::horizon, {50, 100});
  CHECK(s.runs.size() == 2);
  CHECK(s.runs[1].config.horizon == 100);
}

TEST_CASE("default output directory follows the environment variable") {
  setenv("ADAPTCB_OUTPUT_DIR", "/tmp/adaptcb-test", 1);
  CHECK(default_output_dir() == "/tmp/adaptcb-test");
  unsetenv("ADAPTCB_OUTPUT_DIR");
  CHECK(default_output_dir() == "adaptcb_out");
}
