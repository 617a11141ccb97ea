#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>

#include "adaptcb/core.hpp"
#include "adaptcb/oracles.hpp"
#include "adaptcb/selection.hpp"

namespace adaptcb {

/// What a learner did in one round.
struct Decision {
  std::size_t action = 0;
  int base = -1;       // aggregated learners: the base that played
  double q = 1.0;      // master probability of that base
  double rho = 1.0;
  double gamma = 0.0;  // rate handed to the selector
  std::size_t solver_iterations = 0;
  bool solver_called = false;
  bool cap_hit = false;
};

/// Online contextual-bandit learner: act() then observe() each round.
class Learner {
 public:
  virtual ~Learner() = default;
  virtual Decision act(const Vector& context, const ActionSet& actions) = 0;
  virtual void observe(double loss) = 0;
};

/// d log(T + 1), the square-loss regret rate of the linear ONS oracle.
double default_reg_sq(double dim, double horizon, double scale = 1.0);

/// scale * sqrt(d T / (Reg_Sq + eps^2 T)): the fixed rate for a known
/// misspecification bound eps (eps = 0 gives sqrt(d T / Reg_Sq)).
double tuned_gamma(double dim, double horizon, double reg_sq, double eps, double scale = 1.0);

enum class FiniteSelector { igw, log_barrier };

/// Finite-arm reduction: predictions per arm are <a_i, theta_hat>.
class SquareCb final : public Learner {
 public:
  SquareCb(std::unique_ptr<RegressionOracle> oracle, double gamma, FiniteSelector selector,
           std::uint64_t seed);

  Decision act(const Vector& context, const ActionSet& actions) override;
  void observe(double loss) override;

  const SparseDistribution& last_distribution() const { return last_; }
  const Vector& last_prediction() const { return last_theta_; }
  const RegressionOracle& oracle() const { return *oracle_; }

 private:
  std::unique_ptr<RegressionOracle> oracle_;
  double gamma_;
  FiniteSelector selector_;
  RngStream rng_;
  SparseDistribution last_;
  Vector last_theta_;
  std::optional<OracleExample> pending_;
};

/// Per-round arm predictions <a_i, theta_hat>.
Vector arm_predictions(const ActionSet& actions, const Vector& theta_hat);

/// Logdet-barrier reduction at a fixed rate.
class SquareCbLin final : public Learner {
 public:
  SquareCbLin(std::unique_ptr<RegressionOracle> oracle, double gamma, double eta,
              std::uint64_t seed);

  Decision act(const Vector& context, const ActionSet& actions) override;
  void observe(double loss) override;

  std::size_t cap_hits() const { return cap_hits_; }
  std::size_t solver_calls() const { return solver_calls_; }
  const RegressionOracle& oracle() const { return *oracle_; }

 private:
  std::unique_ptr<RegressionOracle> oracle_;
  double gamma_;
  double eta_;
  RngStream rng_;
  std::size_t cap_hits_ = 0;
  std::size_t solver_calls_ = 0;
  std::optional<OracleExample> pending_;
};

struct BasePlusParams {
  double eps_guess = 1.0;   // eps'_m
  double dim = 1.0;         // d used in the rate
  double horizon = 1.0;     // T
  double reg_sq = 1.0;      // Reg_Sq(T)
  double eta = 0.5;         // rounding accuracy; selector runs at gamma / (1 + eta)
};

/// Importance-weighted logdet-barrier base for aggregation. Activated only
/// on rounds where the master picks it.
class BasePlus {
 public:
  BasePlus(std::unique_ptr<RegressionOracle> oracle, BasePlusParams params, std::uint64_t seed);

  /// min(sqrt(d) / eps', sqrt(d T / (rho Reg_Sq))).
  double rate(double rho) const;

  Decision act(const Vector& context, const ActionSet& actions, double q, double rho);
  void observe(double loss);

  const BasePlusParams& params() const { return params_; }
  const WeightedReduction& reduction() const { return reduction_; }
  std::size_t activations() const { return activations_; }
  double last_weight() const { return last_weight_; }
  double max_weight() const { return max_weight_; }
  double first_rate() const { return first_rate_; }
  std::size_t cap_hits() const { return cap_hits_; }

 private:
  BasePlusParams params_;
  WeightedReduction reduction_;
  RngStream play_rng_;
  RngStream oracle_rng_;
  double last_rho_ = 1.0;
  double last_weight_ = 0.0;
  double max_weight_ = 0.0;
  double first_rate_ = 0.0;
  std::size_t activations_ = 0;
  std::size_t cap_hits_ = 0;
  std::optional<OracleExample> pending_;
};

}  // namespace adaptcb
