#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <unordered_map>
#include <vector>

#include "adaptcb/core.hpp"

namespace adaptcb {

// ---------------------------------------------------------------------------
// Finite-arm exploration distributions.
// ---------------------------------------------------------------------------

/// Inverse gap weighting: p_i = 1 / (K + gamma (theta_i - theta_min)) off the
/// leader, the leader (lowest index among ties) takes the remaining mass.
SparseDistribution igw(const Vector& theta, double gamma);

struct LogBarrierSolution {
  SparseDistribution dist;
  double lambda = 0.0;  // normalizer: p_i = 1 / (lambda + gamma theta_i)
};

/// Exact minimizer of <p, theta> - (1/gamma) sum log p_i over the simplex.
LogBarrierSolution log_barrier(const Vector& theta, double gamma);

// ---------------------------------------------------------------------------
// Certificates.
// ---------------------------------------------------------------------------

struct MinimaxValue {
  double value = 0.0;
  /// Centered second moment singular on the affine span of A.
  bool degenerate = false;
};

/// max_a <abar_p - a, theta_hat> + (1/gamma) |abar_p - a|^2 under the inverse
/// of H_p - abar abar^T, restricted to the affine span of `actions`.
/// Equals the value of the per-round minimax game played by p.
MinimaxValue minimax_value(const SparseDistribution& p, const Vector& theta_hat, double gamma,
                           const ActionSet& actions);

struct RoundingCheck {
  bool passed = false;
  /// max_a |a~|^2_{H~^-1} / (d~ + <a - abar, theta>) - 1
  double worst_eta = std::numeric_limits<double>::infinity();
  std::size_t worst_action_index = 0;
  double min_denominator = 0.0;
};

// ---------------------------------------------------------------------------
// Log-determinant barrier.
// ---------------------------------------------------------------------------

/// Frank-Wolfe state for the lifted problem, in coordinates of the affine
/// span of the action set, with gamma already folded into theta:
///   G(p) = <a~_p, theta~> - log det H~_p.
class LiftedState {
 public:
  /// `points` are k x n projected actions, `linear` holds <a_i, theta> for
  /// each action (any common offset is irrelevant).
  LiftedState(Matrix points, Vector linear);

  std::size_t lifted_dim() const { return static_cast<std::size_t>(lifted_.rows()); }
  std::size_t num_actions() const { return static_cast<std::size_t>(lifted_.cols()); }

  /// Starts from `p0`; H~_{p0} must be nonsingular.
  void initialize(const SparseDistribution& p0);
  /// Move to (1 - x) p + x e_j.
  void mix_toward(std::size_t j, double x);
  /// Rebuild H~ and its inverse from the support.
  void refresh();

  /// |a~_i|^2 under H~^{-1}, for every action.
  Vector lifted_norms() const;
  /// d~ + <a_i - abar_p, theta>, for every action.
  Vector denominators() const;
  RoundingCheck check(double eta) const;

  double objective() const { return mean_linear_ - logdet_; }
  double mean_linear() const { return mean_linear_; }
  double linear(std::size_t i) const { return linear_[static_cast<Eigen::Index>(i)]; }
  const Matrix& second_lifted() const { return second_; }
  const Matrix& inv_second() const { return inv_second_; }
  Vector mean_lifted() const;
  /// Frobenius distance of inv_second * second_lifted from I.
  double inverse_drift() const;
  std::size_t support_size() const { return support_.size(); }
  SparseDistribution distribution() const;

 private:
  Matrix lifted_;   // d~ x n, last row ones
  Vector linear_;
  std::vector<std::pair<std::size_t, double>> support_;
  std::unordered_map<std::size_t, std::size_t> position_;
  Matrix second_;
  Matrix inv_second_;
  double mean_linear_ = 0.0;
  double logdet_ = 0.0;
};

/// x in [0, 1) maximizing the decrease
///   f(x) = -c x + (d~ - 1) log(1 - x) + log(1 + x (Z - 1))
/// of G when mixing toward an action with |a~|^2 = Z and <a - abar, theta> = c.
/// Returns {x, f(x)}.
std::pair<double, double> line_search_step(double lifted_norm, double linear_gap,
                                           double lifted_dim);

struct RoundingReport {
  double eta_achieved = std::numeric_limits<double>::infinity();
  std::size_t worst_action_index = 0;
  std::size_t iterations = 0;
  /// G after initialization and after every step.
  std::vector<double> objective_trace;
  /// eta_k of each step; negative for correction steps toward argmin <a, theta>.
  std::vector<double> step_eta;
  std::size_t iteration_cap = 0;
  bool cap_hit = false;
  std::size_t affine_dim = 0;
  std::size_t initial_support = 0;
};

struct LogdetSolution {
  SparseDistribution dist;
  RoundingReport report;
};

struct LogdetOptions {
  std::optional<std::size_t> iteration_cap;
  /// Initial distribution over action indices; default is the greedy
  /// extent-based start (uniform when |A| <= 4 dim).
  std::optional<SparseDistribution> initial;
};

/// 50 (k log max(gamma, e) + k^2 (log k + 1/eta + 2)).
std::size_t frank_wolfe_iteration_cap(std::size_t dim, double gamma, double eta);

/// Greedy start: extreme pairs along directions orthogonal to the spread
/// found so far; at most 2k atoms, affinely spanning. `points` is k x n.
SparseDistribution greedy_initial_distribution(const Matrix& points);

/// Approximate logdet-barrier distribution: an eta-rounding at rate `gamma`.
/// Bandit callers pass gamma / (1 + eta).
LogdetSolution logdet_barrier_solve(const ActionSet& actions, const Vector& theta_hat,
                                    double gamma, double eta, const LogdetOptions& options = {});

/// Tests |a~|^2_{H~_p^-1} <= (1 + eta)(d~ + gamma <a - abar_p, theta_hat>) for
/// all a, in affine-span coordinates. Directions of the span that p does not
/// cover give an infinite ratio. Throws ContractViolation when some
/// denominator is below 1 (no correction toward argmin <a, theta> was made).
RoundingCheck eta_rounding_check(const SparseDistribution& p, const ActionSet& actions,
                                 const Vector& theta_hat, double gamma, double eta);

}  // namespace adaptcb
