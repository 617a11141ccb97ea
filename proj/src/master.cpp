#include "adaptcb/master.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/tools/toms748_solve.hpp>

namespace adaptcb {

Vector tsallis_solve(const Vector& losses, double eta, double* lambda_out) {
  const auto m = losses.size();
  if (m == 0) throw ContractViolation("tsallis_solve: no arms");
  if (!(eta > 0.0)) throw ContractViolation("tsallis_solve: eta must be positive");
  if (!losses.allFinite()) throw ContractViolation("tsallis_solve: non-finite losses");
  const double best = losses.minCoeff();
  // sum_i (eta (L_i - lambda))^-2 is increasing and convex in lambda < min L;
  // it is >= 1 at min L - 1/eta and <= 1 at min L - sqrt(M)/eta.
  double lo = best - std::sqrt(static_cast<double>(m)) / eta;
  double hi = best - 1.0 / eta;
  auto excess = [&](double lambda, double* slope) {
    const Eigen::ArrayXd gap = eta * (losses.array() - lambda);
    const Eigen::ArrayXd p = gap.square().inverse();
    if (slope) *slope = 2.0 * eta * (p / gap).sum();
    return p.sum() - 1.0;
  };
  double lambda = hi;
  for (int iter = 0; iter < 200; ++iter) {
    double slope = 0.0;
    const double g = excess(lambda, &slope);
    if (std::abs(g) <= 1e-13) break;
    (g > 0.0 ? hi : lo) = lambda;
    double next = lambda - g / slope;
    if (!(next >= lo && next <= hi)) next = 0.5 * (lo + hi);
    if (next == lambda) break;
    lambda = next;
  }
  Vector p = (eta * (losses.array() - lambda)).square().inverse().matrix();
  p /= p.sum();
  if (lambda_out) *lambda_out = lambda;
  return p;
}

double tsallis_default_rate(std::size_t horizon) {
  return std::sqrt(1.0 / (2.0 * static_cast<double>(std::max<std::size_t>(horizon, 1))));
}

HedgedTsallisInf::HedgedTsallisInf(std::size_t arms, double eta, double alpha, double hedge)
    : eta_(eta), alpha_(alpha), hedge_(hedge) {
  if (arms == 0) throw ConfigError("master: need at least one arm");
  if (!(eta > 0.0)) throw ConfigError("master: eta must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("master: alpha must lie in (0, 1)");
  if (hedge < 0.0) throw ConfigError("master: R must be nonnegative");
  const auto n = static_cast<Eigen::Index>(arms);
  loss_hat_ = Vector::Zero(n);
  // B_0 = rho_1^alpha R with rho_1 = M under the uniform start.
  ledger0_ = Vector::Constant(n, std::pow(static_cast<double>(arms), alpha) * hedge);
  ledger_ = ledger0_;
  rho_ = Vector::Ones(n);
  play_ = Vector::Constant(n, 1.0 / static_cast<double>(arms));
  biased_.assign(arms, false);
}

MasterDraw HedgedTsallisInf::sample(RngStream& rng) {
  rho_ = rho_.cwiseMax(play_.cwiseInverse());
  std::size_t arm = 0;
  if (arms() > 1) arm = SparseDistribution::from_dense(play_).sample(rng);
  const auto i = static_cast<Eigen::Index>(arm);
  pending_ = MasterDraw{arm, play_[i], rho_[i]};
  return *pending_;
}

BiasEvent HedgedTsallisInf::update(double shifted_loss) {
  if (!pending_) throw ContractViolation("master: update without a preceding sample");
  if (!(shifted_loss >= 0.0 && shifted_loss <= 2.0))
    throw ContractViolation("master: shifted loss outside [0, 2]");
  const MasterDraw draw = *pending_;
  pending_.reset();
  const auto a = static_cast<Eigen::Index>(draw.arm);
  const double estimate = shifted_loss / draw.prob;
  loss_hat_[a] += estimate;

  BiasEvent event;
  event.arm = draw.arm;
  event.estimate = estimate;
  Vector tentative = tsallis_solve(effective_losses(), eta_);
  // Relative slack: right after an event the two sides agree up to round-off.
  if (hedge_ == 0.0 || estimate == 0.0 ||
      std::pow(tentative[a], -alpha_) * hedge_ <= ledger_[a] * (1.0 + 1e-12)) {
    play_ = std::move(tentative);
    return event;
  }

  // phi(b) = p_a(b)^-alpha R - (B_a + b) is decreasing, positive at 0 and
  // negative at b = estimate (p_a falls back to its value at round t).
  const double base = ledger_[a];
  const Vector shifted = effective_losses();
  auto phi = [&](double b) {
    Vector losses = shifted;
    losses[a] -= b;
    const Vector p = tsallis_solve(losses, eta_);
    return std::pow(p[a], -alpha_) * hedge_ - (base + b);
  };
  const double f_lo = phi(0.0);
  const double f_hi = phi(estimate);
  if (!(f_lo > 0.0 && f_hi <= 1e-9 * std::max(1.0, base)))
    throw ContractViolation("master: bias equation is not bracketed");
  double b = estimate;
  if (f_hi < 0.0) {
    auto tol = [&](double x, double y) {
      return std::abs(x - y) <= 1e-13 * std::max(1.0, base + std::max(x, y));
    };
    std::uintmax_t max_iter = 200;
    const auto [left, right] =
        boost::math::tools::toms748_solve(phi, 0.0, estimate, f_lo, f_hi, tol, max_iter);
    b = 0.5 * (left + right);
  }
  ledger_[a] = base + b;
  play_ = tsallis_solve(effective_losses(), eta_);
  biased_[draw.arm] = true;
  event.triggered = true;
  event.bias = b;
  return event;
}

Vector HedgedTsallisInf::rho_including_next() const {
  return rho_.cwiseMax(play_.cwiseInverse());
}

}  // namespace adaptcb
