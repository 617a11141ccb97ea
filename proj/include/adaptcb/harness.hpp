#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "adaptcb/aggregation.hpp"
#include "adaptcb/algorithms.hpp"
#include "adaptcb/environment.hpp"

namespace adaptcb {

enum class AlgorithmKind { squarecb, squarecb_lin, corral, corral_dim_adaptive, tsallis_mab };

std::string to_string(AlgorithmKind v);
AlgorithmKind parse_algorithm(const std::string& s);

struct AlgorithmParams {
  /// Fixed rate for squarecb / squarecb_lin; when absent the rate is tuned
  /// from (d, T, Reg_Sq, eps_known).
  std::optional<double> gamma;
  FiniteSelector selector = FiniteSelector::igw;
  double eps_known = 0.0;
  double gamma_scale = 1.0;
  double eta = 0.5;
  double reg_sq_scale = 1.0;
  OnsParams ons;
  /// d used to tune corral; defaults to the environment dimension.
  std::optional<double> dim_tuning;
  /// Master learning rate for tsallis_mab; default sqrt(1 / (2T)).
  std::optional<double> master_rate;
  double hedge = 0.0;  // R for tsallis_mab
};

struct ExperimentConfig {
  AlgorithmKind algorithm = AlgorithmKind::corral;
  std::size_t horizon = 1000;
  std::vector<std::uint64_t> seeds{1};
  EnvSpec env;
  AlgorithmParams params;
  bool per_round = true;  // write rounds.csv
  std::optional<std::string> output_dir;

  void validate() const;
};

/// Parses and validates; throws ConfigError.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& config);

struct RoundRow {
  std::uint64_t seed = 0;
  std::size_t t = 0;
  int base = -1;
  double q = 1.0;
  double rho = 1.0;
  std::size_t action = 0;
  double loss = 0.0;
  double mean_loss = 0.0;
  double best_mean_loss = 0.0;
  double inst_regret = 0.0;
  double cum_regret = 0.0;
  double cum_misspec_sq = 0.0;
  std::size_t solver_iterations = 0;
  std::size_t dim = 0;
};

/// Header of rounds.csv, in column order.
const char* round_csv_header();
/// One CSV line, floats with 17 significant digits.
std::string round_csv_line(const RoundRow& row);
/// printf("%.17g").
std::string format_double(double v);

struct SeedResult {
  std::uint64_t seed = 0;
  double final_regret = 0.0;
  double eps_upper = 0.0;      // sqrt(mean_t sup_a (eps g)^2)
  double d_avg = 0.0;          // mean affine dimension of A_t
  std::size_t solver_calls = 0;
  std::size_t cap_hits = 0;
  std::size_t episodes = 1;
  bool budgets_respected = true;
  std::vector<double> checkpoint_regret;  // cumulative regret at checkpoints()
};

struct RunSummary {
  ExperimentConfig config;
  std::vector<SeedResult> seeds;
  std::vector<std::size_t> checkpoints;
  double mean_regret = 0.0;
  double stderr_regret = 0.0;
  double slope = 0.0;          // log-log slope of mean cumulative regret over t
  double eps_upper = 0.0;
  double d_avg = 0.0;
  double cap_hit_rate = 0.0;
  std::size_t bases = 0;
  std::vector<double> eps_grid;
};

std::unique_ptr<Learner> make_learner(const ExperimentConfig& config, std::uint64_t seed);

/// One seed; rows are passed to `sink` when non-null.
SeedResult run_seed(const ExperimentConfig& config, std::uint64_t seed,
                    const std::function<void(const RoundRow&)>& sink = {});

/// All seeds, sequentially. Writes rounds.csv to `csv` when non-null.
RunSummary run_experiment(const ExperimentConfig& config, std::ostream* csv = nullptr);

std::string summary_to_json(const RunSummary& summary);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);
/// Slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

enum class SweepAxis { horizon, eps, dim };
SweepAxis parse_sweep_axis(const std::string& s);

struct SweepResult {
  SweepAxis axis;
  std::vector<double> values;
  std::vector<RunSummary> runs;
  double loglog_slope = 0.0;  // mean regret against the axis value (positive values only)
  LinearFit linear;           // mean regret against the axis value
};

/// Applies `value` on `axis` to a copy of `config`.
ExperimentConfig with_axis_value(const ExperimentConfig& config, SweepAxis axis, double value);
SweepResult run_sweep(const ExperimentConfig& config, SweepAxis axis,
                      const std::vector<double>& values);
std::string sweep_to_json(const SweepResult& sweep);

/// Directory named by ADAPTCB_OUTPUT_DIR, else "adaptcb_out".
std::string default_output_dir();

}  // namespace adaptcb
