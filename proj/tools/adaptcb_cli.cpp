#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "adaptcb/checks.hpp"
#include "adaptcb/harness.hpp"

namespace fs = std::filesystem;
using namespace adaptcb;

namespace {

enum Exit { kOk = 0, kConfig = 1, kInvariant = 2, kContract = 3 };

fs::path resolve_out(const ExperimentConfig& config, const std::string& flag) {
  if (!flag.empty()) return flag;
  if (config.output_dir) return *config.output_dir;
  return default_output_dir();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text << '\n';
}

int cmd_run(const std::string& config_path, const std::string& out_flag) {
  const ExperimentConfig config = load_config(config_path);
  const fs::path dir = resolve_out(config, out_flag);
  fs::create_directories(dir);
  RunSummary summary;
  if (config.per_round) {
    std::ofstream csv(dir / "rounds.csv", std::ios::binary);
    if (!csv) throw ConfigError("cannot write " + (dir / "rounds.csv").string());
    summary = run_experiment(config, &csv);
  } else {
    summary = run_experiment(config);
  }
  write_file(dir / "summary.json", summary_to_json(summary));
  std::printf("mean regret %.6g (stderr %.3g) over %zu seeds -> %s\n", summary.mean_regret,
              summary.stderr_regret, summary.seeds.size(), dir.string().c_str());
  return kOk;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("sweep: bad value '" + item + "'");
    }
  }
  return out;
}

int cmd_sweep(const std::string& config_path, const std::string& axis,
              const std::string& values, const std::string& out_flag) {
  const ExperimentConfig config = load_config(config_path);
  const SweepResult sweep = run_sweep(config, parse_sweep_axis(axis), parse_values(values));
  const fs::path dir = resolve_out(config, out_flag);
  fs::create_directories(dir);
  for (std::size_t i = 0; i < sweep.runs.size(); ++i)
    write_file(dir / (axis + "_" + format_double(sweep.values[i]) + ".json"),
               summary_to_json(sweep.runs[i]));
  write_file(dir / "sweep_summary.json", sweep_to_json(sweep));
  for (std::size_t i = 0; i < sweep.runs.size(); ++i)
    std::printf("%s=%-10g mean regret %.6g\n", axis.c_str(), sweep.values[i],
                sweep.runs[i].mean_regret);
  std::printf("loglog slope %.4f, linear slope %.4f intercept %.4f r2 %.4f\n", sweep.loglog_slope,
              sweep.linear.slope, sweep.linear.intercept, sweep.linear.r2);
  return kOk;
}

int cmd_check(const std::string& suite) {
  const auto results = run_checks(suite);
  std::size_t failures = 0;
  for (const auto& r : results) {
    std::printf("[%s] %-9s %s: %s\n", r.passed ? "PASS" : "FAIL", r.suite.c_str(),
                r.name.c_str(), r.detail.c_str());
    if (!r.passed) ++failures;
  }
  std::printf("%zu checks, %zu failed\n", results.size(), failures);
  return failures == 0 ? kOk : kInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contextual-bandit reductions: simulation runner and invariant checks"};
  app.require_subcommand(1);

  std::string config_path, out_dir, axis, values, suite;
  auto* run = app.add_subcommand("run", "Run one experiment");
  run->add_option("--config", config_path, "JSON config")->required();
  run->add_option("--out", out_dir, "Output directory (default: $ADAPTCB_OUTPUT_DIR)");

  auto* sweep = app.add_subcommand("sweep", "Run one experiment per axis value");
  sweep->add_option("--config", config_path, "JSON config")->required();
  sweep->add_option("--axis", axis, "T, eps or d")->required();
  sweep->add_option("--values", values, "Comma-separated ascending values")->required();
  sweep->add_option("--out", out_dir, "Output directory (default: $ADAPTCB_OUTPUT_DIR)");

  auto* check = app.add_subcommand("check", "Run invariant suites");
  check->add_option("--suite", suite, "selectors, master, oracle, env or all")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run) return cmd_run(config_path, out_dir);
    if (*sweep) return cmd_sweep(config_path, axis, values, out_dir);
    if (*check) return cmd_check(suite);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const ContractViolation& e) {
    std::fprintf(stderr, "contract violation: %s\n", e.what());
    return kContract;
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  }
  return kOk;
}
