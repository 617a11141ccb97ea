#include "adaptcb/algorithms.hpp"

#include <algorithm>
#include <cmath>

namespace adaptcb {

namespace {

constexpr std::uint64_t kPlayTag = 0x706c6179;
constexpr std::uint64_t kOracleTag = 0x6f72636c;

}  // namespace

double default_reg_sq(double dim, double horizon, double scale) {
  return scale * dim * std::log(horizon + 1.0);
}

double tuned_gamma(double dim, double horizon, double reg_sq, double eps, double scale) {
  if (!(dim > 0.0 && horizon > 0.0 && reg_sq > 0.0))
    throw ConfigError("tuned_gamma: dimension, horizon and Reg_Sq must be positive");
  return scale * std::sqrt(dim * horizon / (reg_sq + eps * eps * horizon));
}

Vector arm_predictions(const ActionSet& actions, const Vector& theta_hat) {
  Vector out(static_cast<Eigen::Index>(actions.size()));
  for (std::size_t i = 0; i < actions.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = actions[i].dot(theta_hat);
  return out;
}

SquareCb::SquareCb(std::unique_ptr<RegressionOracle> oracle, double gamma,
                   FiniteSelector selector, std::uint64_t seed)
    : oracle_(std::move(oracle)), gamma_(gamma), selector_(selector),
      rng_(RngStream::derive(seed, kPlayTag)) {
  if (!oracle_) throw ConfigError("SquareCb: null oracle");
  if (!(gamma > 0.0)) throw ConfigError("SquareCb: gamma must be positive");
}

Decision SquareCb::act(const Vector& context, const ActionSet& actions) {
  last_theta_ = oracle_->predict(context);
  const Vector theta = arm_predictions(actions, last_theta_);
  last_ = selector_ == FiniteSelector::igw ? igw(theta, gamma_)
          : actions.size() == 1            ? SparseDistribution::point_mass(0)
                                           : log_barrier(theta, gamma_).dist;
  Decision out;
  out.action = last_.sample(rng_);
  out.gamma = gamma_;
  pending_ = OracleExample{1.0, context, actions[out.action], 0.0};
  return out;
}

void SquareCb::observe(double loss) {
  if (!pending_) throw ContractViolation("SquareCb: observe without act");
  pending_->loss = loss;
  oracle_->update(*pending_);
  pending_.reset();
}

SquareCbLin::SquareCbLin(std::unique_ptr<RegressionOracle> oracle, double gamma, double eta,
                         std::uint64_t seed)
    : oracle_(std::move(oracle)), gamma_(gamma), eta_(eta),
      rng_(RngStream::derive(seed, kPlayTag)) {
  if (!oracle_) throw ConfigError("SquareCbLin: null oracle");
  if (!(gamma > 0.0)) throw ConfigError("SquareCbLin: gamma must be positive");
  if (!(eta > 0.0)) throw ConfigError("SquareCbLin: eta must be positive");
}

Decision SquareCbLin::act(const Vector& context, const ActionSet& actions) {
  Decision out;
  out.gamma = gamma_;
  if (actions.size() > 1) {
    const Vector theta = oracle_->predict(context);
    const LogdetSolution sol = logdet_barrier_solve(actions, theta, gamma_ / (1.0 + eta_), eta_);
    ++solver_calls_;
    out.solver_called = true;
    out.solver_iterations = sol.report.iterations;
    out.cap_hit = sol.report.cap_hit;
    if (out.cap_hit) ++cap_hits_;
    out.action = sol.dist.sample(rng_);
  }
  pending_ = OracleExample{1.0, context, actions[out.action], 0.0};
  return out;
}

void SquareCbLin::observe(double loss) {
  if (!pending_) throw ContractViolation("SquareCbLin: observe without act");
  pending_->loss = loss;
  oracle_->update(*pending_);
  pending_.reset();
}

BasePlus::BasePlus(std::unique_ptr<RegressionOracle> oracle, BasePlusParams params,
                   std::uint64_t seed)
    : params_(params), reduction_(std::move(oracle)),
      play_rng_(RngStream::derive(seed, kPlayTag)),
      oracle_rng_(RngStream::derive(seed, kOracleTag)) {
  if (!(params_.eps_guess > 0.0 && params_.dim > 0.0 && params_.horizon > 0.0 &&
        params_.reg_sq > 0.0 && params_.eta > 0.0))
    throw ConfigError("BasePlus: parameters must be positive");
}

double BasePlus::rate(double rho) const {
  return std::min(std::sqrt(params_.dim) / params_.eps_guess,
                  std::sqrt(params_.dim * params_.horizon / (rho * params_.reg_sq)));
}

Decision BasePlus::act(const Vector& context, const ActionSet& actions, double q, double rho) {
  if (!(q > 0.0 && q <= 1.0)) throw ContractViolation("BasePlus: q must lie in (0, 1]");
  if (rho < 1.0 || rho < last_rho_) throw ContractViolation("BasePlus: rho must be non-decreasing");
  last_rho_ = rho;
  const double gamma = rate(rho);
  const double weight = gamma / q;
  if (activations_ == 0) first_rate_ = gamma;
  ++activations_;
  last_weight_ = weight;
  max_weight_ = std::max(max_weight_, weight);

  const Vector theta = reduction_.predict(weight, context);
  Decision out;
  out.q = q;
  out.rho = rho;
  out.gamma = gamma;
  if (actions.size() > 1) {
    const LogdetSolution sol =
        logdet_barrier_solve(actions, theta, gamma / (1.0 + params_.eta), params_.eta);
    out.solver_called = true;
    out.solver_iterations = sol.report.iterations;
    out.cap_hit = sol.report.cap_hit;
    if (out.cap_hit) ++cap_hits_;
    out.action = sol.dist.sample(play_rng_);
  }
  pending_ = OracleExample{weight, context, actions[out.action], 0.0};
  return out;
}

void BasePlus::observe(double loss) {
  if (!pending_) throw ContractViolation("BasePlus: observe without act");
  pending_->loss = loss;
  reduction_.update(*pending_, oracle_rng_);
  pending_.reset();
}

}  // namespace adaptcb
