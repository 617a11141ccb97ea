#include "adaptcb/oracles.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace adaptcb {

OnlineNewtonStep::OnlineNewtonStep(std::size_t dim, OnsParams params) : params_(params) {
  if (dim == 0) throw ConfigError("ONS: dimension must be positive");
  if (!(params_.ridge > 0.0) || !(params_.step_scale > 0.0))
    throw ConfigError("ONS: ridge and step_scale must be positive");
  const auto n = static_cast<Eigen::Index>(dim);
  param_ = Vector::Zero(n);
  precond_ = params_.ridge * Matrix::Identity(n, n);
  precond_inv_ = (1.0 / params_.ridge) * Matrix::Identity(n, n);
}

void OnlineNewtonStep::reset() {
  const auto n = param_.size();
  param_.setZero();
  precond_ = params_.ridge * Matrix::Identity(n, n);
  precond_inv_ = (1.0 / params_.ridge) * Matrix::Identity(n, n);
}

void OnlineNewtonStep::step(const Vector& features, double loss, double weight) {
  if (features.size() != param_.size()) throw ConfigError("ONS: feature dimension mismatch");
  const double residual = features.dot(param_) - loss;
  const Vector grad = (2.0 * weight * residual) * features;
  if (grad.squaredNorm() == 0.0) return;

  precond_.noalias() += grad * grad.transpose();
  const Vector inv_grad = precond_inv_ * grad;
  precond_inv_.noalias() -= (inv_grad * inv_grad.transpose()) / (1.0 + grad.dot(inv_grad));
  // Newton direction under the updated preconditioner.
  const Vector direction = precond_inv_ * grad;
  param_ = project(param_ - params_.step_scale * direction);
}

// argmin_{|x| <= 1} (x - y)^T A (x - y). The KKT point is
// x(mu) = (A + mu I)^{-1} A y, and |x(mu)| decreases in mu.
Vector OnlineNewtonStep::project(const Vector& y) const {
  if (y.norm() <= 1.0) return y;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(precond_);
  const Vector& lambda = eig.eigenvalues();
  const Vector coeff = eig.eigenvectors().transpose() * y;
  auto norm_at = [&](double mu) {
    return (lambda.array() * coeff.array() / (lambda.array() + mu)).matrix().norm();
  };
  double lo = 0.0;
  double hi = lambda.maxCoeff() * (y.norm() - 1.0);
  while (norm_at(hi) > 1.0) hi *= 2.0;
  while (hi - lo > params_.projection_tol * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    (norm_at(mid) > 1.0 ? lo : hi) = mid;
  }
  Vector x = eig.eigenvectors() *
             (lambda.array() * coeff.array() / (lambda.array() + hi)).matrix();
  // hi is on the feasible side; clip round-off.
  const double n = x.norm();
  if (n > 1.0) x /= n;
  return x;
}

OnsOracle::OnsOracle(std::size_t dim, OnsParams params) : dim_(dim), ons_(dim, params) {}

Vector OnsOracle::predict(const Vector& /*context*/) const { return ons_.parameter(); }

void OnsOracle::update(const OracleExample& example) {
  if (static_cast<std::size_t>(example.action.size()) != dim_)
    throw ConfigError("OnsOracle: action dimension mismatch");
  ons_.step(example.action, example.loss, example.weight);
}

std::unique_ptr<RegressionOracle> OnsOracle::clone() const {
  return std::make_unique<OnsOracle>(*this);
}

FeatureMappedOnsOracle::FeatureMappedOnsOracle(std::size_t action_dim, std::size_t feature_dim,
                                               OnsParams params)
    : action_dim_(action_dim), feature_dim_(feature_dim), ons_(action_dim * feature_dim, params) {}

Vector FeatureMappedOnsOracle::predict(const Vector& context) const {
  if (static_cast<std::size_t>(context.size()) != feature_dim_)
    throw ConfigError("FeatureMappedOnsOracle: context dimension mismatch");
  // vec() is column-major: Theta(i, j) = param[j * action_dim + i].
  const Eigen::Map<const Matrix> theta(ons_.parameter().data(),
                                       static_cast<Eigen::Index>(action_dim_),
                                       static_cast<Eigen::Index>(feature_dim_));
  return theta * context;
}

Vector FeatureMappedOnsOracle::features(const Vector& action, const Vector& context) const {
  if (static_cast<std::size_t>(action.size()) != action_dim_ ||
      static_cast<std::size_t>(context.size()) != feature_dim_)
    throw ConfigError("FeatureMappedOnsOracle: dimension mismatch");
  Vector z(static_cast<Eigen::Index>(action_dim_ * feature_dim_));
  for (Eigen::Index j = 0; j < context.size(); ++j)
    z.segment(j * action.size(), action.size()) = context[j] * action;
  return z;
}

void FeatureMappedOnsOracle::update(const OracleExample& example) {
  ons_.step(features(example.action, example.context), example.loss, example.weight);
}

std::unique_ptr<RegressionOracle> FeatureMappedOnsOracle::clone() const {
  return std::make_unique<FeatureMappedOnsOracle>(*this);
}

WeightedReduction::WeightedReduction(std::unique_ptr<RegressionOracle> inner)
    : inner_(std::move(inner)) {
  if (!inner_) throw ConfigError("WeightedReduction: null inner oracle");
}

void WeightedReduction::observe_weight(double weight) {
  if (weight < 0.0) throw ContractViolation("WeightedReduction: negative weight");
  if (weight > w_max_) {
    inner_->reset();
    w_max_ = 2.0 * weight;
    ++resets_;
  }
}

Vector WeightedReduction::predict(double weight, const Vector& context) {
  observe_weight(weight);
  return inner_->predict(context);
}

bool WeightedReduction::update(const OracleExample& example, RngStream& rng) {
  observe_weight(example.weight);
  // Ber(w / w_max) with the 0/0 case (all weights zero so far) read as 0.
  const double prob = w_max_ > 0.0 ? example.weight / w_max_ : 0.0;
  if (!rng.bernoulli(prob)) return false;
  OracleExample unweighted = example;
  unweighted.weight = 1.0;
  inner_->update(unweighted);
  ++inner_updates_;
  return true;
}

std::unique_ptr<RegressionOracle> make_linear_oracle(std::size_t action_dim,
                                                     std::size_t feature_dim,
                                                     OnsParams params) {
  if (feature_dim == 0) return std::make_unique<OnsOracle>(action_dim, params);
  return std::make_unique<FeatureMappedOnsOracle>(action_dim, feature_dim, params);
}

}  // namespace adaptcb
