#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "adaptcb/algorithms.hpp"
#include "adaptcb/master.hpp"

namespace adaptcb {

/// Builds a fresh regression oracle for one base.
using OracleFactory = std::function<std::unique_ptr<RegressionOracle>()>;

struct CorralParams {
  std::size_t horizon = 1000;
  double dim = 1.0;           // d used in base rates and in R
  double reg_sq = 1.0;        // Reg_Sq(T) for the base schedule
  double eta = 0.5;           // rounding accuracy of the bases
  double alpha = 0.5;
  /// Overrides for tests; defaults follow the tuning below.
  std::optional<std::size_t> bases;
  std::optional<double> hedge;
  std::optional<double> master_rate;
};

/// floor(ln T), at least 1.
std::size_t corral_base_count(std::size_t horizon);
/// eps'_m = exp(-m), m = 1..M.
std::vector<double> corral_eps_grid(std::size_t bases);
/// (3/2) sqrt(d T Reg_Sq).
double corral_hedge(double dim, double horizon, double reg_sq);

/// Hedged Tsallis-INF master over importance-weighted logdet-barrier bases.
class Corral final : public Learner {
 public:
  Corral(const CorralParams& params, const OracleFactory& make_oracle, std::uint64_t seed);

  Decision act(const Vector& context, const ActionSet& actions) override;
  void observe(double loss) override;

  const HedgedTsallisInf& master() const { return master_; }
  const BasePlus& base(std::size_t m) const { return *bases_[m]; }
  std::size_t base_count() const { return bases_.size(); }
  const std::vector<double>& eps_grid() const { return eps_grid_; }
  const BiasEvent& last_bias_event() const { return last_event_; }
  std::size_t cap_hits() const;

 private:
  CorralParams params_;
  std::vector<double> eps_grid_;
  HedgedTsallisInf master_;
  std::vector<std::unique_ptr<BasePlus>> bases_;
  RngStream master_rng_;
  std::optional<std::size_t> active_;
  BiasEvent last_event_;
};

/// Restarts Corral whenever the running sum of dim(A_t) in an episode
/// would exceed its budget D_i; D_1 = T, D_{i+1} = 2 D_i. Episode i is tuned
/// for d_guess = clamp(D_i / T, 1, d).
class DimensionAdaptive final : public Learner {
 public:
  /// `make_params(d_guess)` returns the Corral tuning for one episode.
  DimensionAdaptive(std::size_t horizon, double max_dim,
                    std::function<CorralParams(double)> make_params, OracleFactory make_oracle,
                    std::uint64_t seed);

  Decision act(const Vector& context, const ActionSet& actions) override;
  void observe(double loss) override;

  std::size_t episodes() const { return restarts_.size(); }
  /// Rounds (1-based) at which each episode started.
  const std::vector<std::size_t>& restarts() const { return restarts_; }
  const std::vector<double>& budgets() const { return budgets_; }
  /// Sum of dim(A_t) charged to each episode.
  const std::vector<double>& episode_dims() const { return episode_dims_; }
  double d_guess() const { return d_guess_; }
  const Corral& inner() const { return *inner_; }

 private:
  void start_episode(std::size_t round);

  std::size_t horizon_;
  double max_dim_;
  std::function<CorralParams(double)> make_params_;
  OracleFactory make_oracle_;
  std::uint64_t seed_;
  std::unique_ptr<Corral> inner_;
  std::size_t round_ = 0;
  double d_guess_ = 1.0;
  std::vector<std::size_t> restarts_;
  std::vector<double> budgets_;
  std::vector<double> episode_dims_;
};

}  // namespace adaptcb
