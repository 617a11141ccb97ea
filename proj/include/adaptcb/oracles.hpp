#pragma once

#include <cstddef>
#include <functional>
#include <memory>

#include "adaptcb/core.hpp"

namespace adaptcb {

/// One (w_t, x_t, a_t, l_t) tuple handed to a regression oracle.
struct OracleExample {
  double weight = 1.0;
  Vector context;
  Vector action;
  double loss = 0.0;
};

/// Online square-loss regression oracle.
///
/// predict() maps a context to a loss-predictor vector theta_hat in R^d, so
/// that <a, theta_hat> predicts the mean loss of action a.
class RegressionOracle {
 public:
  virtual ~RegressionOracle() = default;

  virtual Vector predict(const Vector& context) const = 0;
  /// Weighted square-loss update; an oracle without native weights applies w
  /// as a gradient multiplier.
  virtual void update(const OracleExample& example) = 0;
  /// Back to the freshly constructed state.
  virtual void reset() = 0;
  virtual std::size_t action_dim() const = 0;
  virtual std::unique_ptr<RegressionOracle> clone() const = 0;
};

struct OnsParams {
  double ridge = 1.0;
  /// Multiplier on the Newton direction. The exp-concavity argument for the
  /// square loss with residuals in [-2, 2] and unit-ball iterates gives
  /// beta = 1/64; see README for the measured default.
  double step_scale = 1.0;
  double projection_tol = 1e-10;
};

/// Online Newton step over a parameter vector in the unit ball, fed with
/// feature vectors z (prediction <z, w>). Shared engine of both linear
/// oracles below.
class OnlineNewtonStep {
 public:
  OnlineNewtonStep(std::size_t dim, OnsParams params);

  const Vector& parameter() const { return param_; }
  const Matrix& precond() const { return precond_; }
  const Matrix& precond_inverse() const { return precond_inv_; }
  const OnsParams& params() const { return params_; }

  /// Gradient step on w * (<z, param> - loss)^2.
  void step(const Vector& features, double loss, double weight);
  void reset();

 private:
  Vector project(const Vector& y) const;

  OnsParams params_;
  Vector param_;
  Matrix precond_;
  Matrix precond_inv_;
};

/// Linear-bandit class F = {x -> theta : |theta| <= 1}; context is ignored.
class OnsOracle final : public RegressionOracle {
 public:
  explicit OnsOracle(std::size_t dim, OnsParams params = {});

  Vector predict(const Vector& context) const override;
  void update(const OracleExample& example) override;
  void reset() override { ons_.reset(); }
  std::size_t action_dim() const override { return dim_; }
  std::unique_ptr<RegressionOracle> clone() const override;

  const OnlineNewtonStep& engine() const { return ons_; }

 private:
  std::size_t dim_;
  OnlineNewtonStep ons_;
};

/// F = {x -> Theta psi(x)} with psi(x) = x; ONS over vec(Theta) using
/// rank-one features a (x) psi(x).
class FeatureMappedOnsOracle final : public RegressionOracle {
 public:
  FeatureMappedOnsOracle(std::size_t action_dim, std::size_t feature_dim,
                         OnsParams params = {});

  Vector predict(const Vector& context) const override;
  void update(const OracleExample& example) override;
  void reset() override { ons_.reset(); }
  std::size_t action_dim() const override { return action_dim_; }
  std::size_t feature_dim() const { return feature_dim_; }
  std::unique_ptr<RegressionOracle> clone() const override;

 private:
  Vector features(const Vector& action, const Vector& context) const;

  std::size_t action_dim_;
  std::size_t feature_dim_;
  OnlineNewtonStep ons_;
};

/// Randomized weighted -> unweighted reduction. Resets the inner oracle when
/// a weight exceeds w_max (then w_max = 2w) and forwards an update with
/// probability w / w_max.
class WeightedReduction {
 public:
  explicit WeightedReduction(std::unique_ptr<RegressionOracle> inner);

  /// Applies the reset rule for the incoming weight.
  void observe_weight(double weight);
  /// Prediction for a round carrying `weight`; may reset first.
  Vector predict(double weight, const Vector& context);
  /// Returns true when the example was passed to the inner oracle.
  bool update(const OracleExample& example, RngStream& rng);

  double w_max() const { return w_max_; }
  std::size_t reset_count() const { return resets_; }
  std::size_t inner_update_count() const { return inner_updates_; }
  const RegressionOracle& inner() const { return *inner_; }

 private:
  std::unique_ptr<RegressionOracle> inner_;
  double w_max_ = 0.0;
  std::size_t resets_ = 0;
  std::size_t inner_updates_ = 0;
};

/// Factory for oracles matching an environment's context/action layout.
std::unique_ptr<RegressionOracle> make_linear_oracle(std::size_t action_dim,
                                                     std::size_t feature_dim,
                                                     OnsParams params = {});

}  // namespace adaptcb
