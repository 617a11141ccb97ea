#include "adaptcb/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace adaptcb {

SparseDistribution igw(const Vector& theta, double gamma) {
  const auto k = static_cast<std::size_t>(theta.size());
  if (k == 0) throw ContractViolation("igw: empty predictor");
  if (gamma < 0.0) throw ContractViolation("igw: gamma must be nonnegative");
  const std::size_t leader = argmin_index(theta);
  const double best = theta[static_cast<Eigen::Index>(leader)];
  std::vector<SparseDistribution::Atom> atoms(k);
  double rest = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (i == leader) continue;
    const double prob =
        1.0 / (static_cast<double>(k) + gamma * (theta[static_cast<Eigen::Index>(i)] - best));
    atoms[i] = {i, prob};
    rest += prob;
  }
  atoms[leader] = {leader, 1.0 - rest};
  return SparseDistribution(std::move(atoms));
}

LogBarrierSolution log_barrier(const Vector& theta, double gamma) {
  const auto k = theta.size();
  if (k < 1) throw ContractViolation("log_barrier: empty predictor");
  if (!(gamma > 0.0)) throw ContractViolation("log_barrier: gamma must be positive");
  const double best = theta.minCoeff();
  const Vector gaps = gamma * (theta.array() - best).matrix();
  // With mu = lambda + gamma min(theta): h(mu) = sum 1/(mu + gap_i) - 1 is
  // convex and decreasing, h(1) >= 0 >= h(K). Newton from the left stays
  // left of the root; bisection guards round-off.
  double lo = 1.0;
  double hi = static_cast<double>(k);
  double mu = lo;
  for (int iter = 0; iter < 200; ++iter) {
    const Eigen::ArrayXd inv = 1.0 / (mu + gaps.array());
    const double h = inv.sum() - 1.0;
    if (std::abs(h) <= 1e-15) break;
    (h > 0.0 ? lo : hi) = mu;
    const double slope = -(inv * inv).sum();
    double next = mu - h / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == mu) break;
    mu = next;
  }
  std::vector<SparseDistribution::Atom> atoms;
  atoms.reserve(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < k; ++i)
    atoms.emplace_back(static_cast<std::size_t>(i), 1.0 / (mu + gaps[i]));
  return {SparseDistribution(std::move(atoms)), mu - gamma * best};
}

MinimaxValue minimax_value(const SparseDistribution& p, const Vector& theta_hat, double gamma,
                           const ActionSet& actions) {
  if (!(gamma > 0.0)) throw ContractViolation("minimax_value: gamma must be positive");
  const Moments m = moments(p, actions);
  const Matrix basis = affine_basis(actions);
  const Matrix cov = basis.transpose() * m.covariance() * basis;
  MinimaxValue out;
  if (basis.cols() == 0) {
    out.value = 0.0;
    for (const auto& a : actions.actions())
      out.value = std::max(out.value, (m.mean_action - a).dot(theta_hat));
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  if (eig.eigenvalues().minCoeff() < 1e-12) {
    out.degenerate = true;
    out.value = std::numeric_limits<double>::infinity();
    return out;
  }
  const Eigen::LDLT<Matrix> solver(cov);
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& a : actions.actions()) {
    const Vector diff = m.mean_action - a;
    const Vector v = basis.transpose() * diff;
    best = std::max(best, diff.dot(theta_hat) + v.dot(solver.solve(v)) / gamma);
  }
  out.value = best;
  return out;
}

// ---------------------------------------------------------------------------

LiftedState::LiftedState(Matrix points, Vector linear) : linear_(std::move(linear)) {
  if (points.cols() != linear_.size())
    throw ContractViolation("LiftedState: points and linear terms disagree");
  lifted_.resize(points.rows() + 1, points.cols());
  lifted_.topRows(points.rows()) = points;
  lifted_.row(points.rows()).setOnes();
}

void LiftedState::initialize(const SparseDistribution& p0) {
  support_.clear();
  position_.clear();
  for (const auto& [index, prob] : p0.support()) {
    if (index >= num_actions()) throw ContractViolation("LiftedState: index out of range");
    position_[index] = support_.size();
    support_.emplace_back(index, prob);
  }
  refresh();
}

void LiftedState::refresh() {
  const auto dl = lifted_.rows();
  second_ = Matrix::Zero(dl, dl);
  mean_linear_ = 0.0;
  for (const auto& [index, prob] : support_) {
    const auto col = lifted_.col(static_cast<Eigen::Index>(index));
    second_.noalias() += prob * col * col.transpose();
    mean_linear_ += prob * linear_[static_cast<Eigen::Index>(index)];
  }
  const Eigen::LDLT<Matrix> ldlt(second_);
  const Vector diag = ldlt.vectorD();
  if (ldlt.info() != Eigen::Success || diag.minCoeff() <= 1e-12 * std::max(1.0, diag.maxCoeff()))
    throw ContractViolation("LiftedState: lifted second moment is singular");
  inv_second_ = ldlt.solve(Matrix::Identity(dl, dl));
  inv_second_ = 0.5 * (inv_second_ + inv_second_.transpose()).eval();
  logdet_ = diag.array().log().sum();
}

void LiftedState::mix_toward(std::size_t j, double x) {
  if (x <= 0.0) return;
  if (!(x < 1.0)) throw ContractViolation("LiftedState: step must lie in [0, 1)");
  for (auto& atom : support_) atom.second *= (1.0 - x);
  if (auto it = position_.find(j); it != position_.end()) {
    support_[it->second].second += x;
  } else {
    position_[j] = support_.size();
    support_.emplace_back(j, x);
  }
  const auto a = lifted_.col(static_cast<Eigen::Index>(j));
  const double dl = static_cast<double>(lifted_.rows());
  const Vector inv_a = inv_second_ * a;
  const double z = a.dot(inv_a);
  // (1 - x) H + x a a^T, inverse by Sherman-Morrison.
  const double s = x / (1.0 - x);
  inv_second_ = (inv_second_ - (s / (1.0 + s * z)) * inv_a * inv_a.transpose()) / (1.0 - x);
  second_ = (1.0 - x) * second_ + x * a * a.transpose();
  logdet_ += (dl - 1.0) * std::log1p(-x) + std::log1p(x * (z - 1.0));
  mean_linear_ = (1.0 - x) * mean_linear_ + x * linear_[static_cast<Eigen::Index>(j)];
}

Vector LiftedState::lifted_norms() const {
  return (lifted_.array() * (inv_second_ * lifted_).array()).colwise().sum().transpose();
}

Vector LiftedState::denominators() const {
  return (linear_.array() - mean_linear_ + static_cast<double>(lifted_.rows())).matrix();
}

RoundingCheck LiftedState::check(double eta) const {
  const Vector norms = lifted_norms();
  const Vector dens = denominators();
  RoundingCheck out;
  out.passed = true;
  out.worst_eta = -std::numeric_limits<double>::infinity();
  out.min_denominator = dens.minCoeff();
  for (Eigen::Index i = 0; i < norms.size(); ++i) {
    const double ratio = dens[i] > 0.0 ? norms[i] / dens[i] - 1.0
                                       : std::numeric_limits<double>::infinity();
    if (ratio > out.worst_eta) {
      out.worst_eta = ratio;
      out.worst_action_index = static_cast<std::size_t>(i);
    }
    if (!(norms[i] <= (1.0 + eta) * dens[i])) out.passed = false;
  }
  return out;
}

Vector LiftedState::mean_lifted() const {
  Vector mean = Vector::Zero(lifted_.rows());
  for (const auto& [index, prob] : support_) mean += prob * lifted_.col(static_cast<Eigen::Index>(index));
  return mean;
}

double LiftedState::inverse_drift() const {
  return (inv_second_ * second_ - Matrix::Identity(second_.rows(), second_.cols())).norm();
}

SparseDistribution LiftedState::distribution() const {
  double total = 0.0;
  for (const auto& atom : support_) total += atom.second;
  std::vector<SparseDistribution::Atom> atoms;
  atoms.reserve(support_.size());
  for (const auto& [index, prob] : support_)
    if (prob > 0.0) atoms.emplace_back(index, prob / total);
  return SparseDistribution(std::move(atoms));
}

// ---------------------------------------------------------------------------

std::pair<double, double> line_search_step(double lifted_norm, double linear_gap,
                                           double lifted_dim) {
  const double u = lifted_norm - 1.0;
  const double c = linear_gap;
  const double dl = lifted_dim;
  auto decrease = [&](double x) {
    return -c * x + (dl - 1.0) * std::log1p(-x) + std::log1p(x * u);
  };
  // f is concave on [0, 1); f'(0) <= 0 means staying put is optimal.
  if (u - c - (dl - 1.0) <= 0.0) return {0.0, 0.0};
  // f'(x) = 0  <=>  (c u) x^2 + (c - c u - d~ u) x + (u - c - d~ + 1) = 0.
  const double qa = c * u;
  const double qb = c - c * u - dl * u;
  const double qc = u - c - dl + 1.0;
  std::vector<double> roots;
  if (std::abs(qa) <= 1e-14 * (std::abs(qb) + std::abs(qc))) {
    if (qb != 0.0) roots.push_back(-qc / qb);
  } else {
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      const double q = -0.5 * (qb + std::copysign(sq, qb));
      if (q != 0.0) {
        roots.push_back(q / qa);
        roots.push_back(qc / q);
      }
    }
  }
  double best_x = 0.0;
  double best_f = 0.0;
  for (double x : roots) {
    if (!(x >= 0.0 && x < 1.0)) continue;
    const double f = decrease(x);
    if (f > best_f) {
      best_x = x;
      best_f = f;
    }
  }
  return {best_x, best_f};
}

std::size_t frank_wolfe_iteration_cap(std::size_t dim, double gamma, double eta) {
  const double k = static_cast<double>(std::max<std::size_t>(dim, 1));
  const double bound = k * std::log(std::max(gamma, std::numbers::e)) +
                       k * k * (std::log(k) + 1.0 / eta + 2.0);
  return static_cast<std::size_t>(std::ceil(50.0 * bound));
}

SparseDistribution greedy_initial_distribution(const Matrix& points) {
  const auto k = points.rows();
  const auto n = points.cols();
  if (n == 0) throw ContractViolation("greedy_initial_distribution: no points");
  Matrix basis(k, 0);
  std::vector<std::size_t> chosen;
  auto add = [&](std::size_t i) {
    if (std::find(chosen.begin(), chosen.end(), i) == chosen.end()) chosen.push_back(i);
  };
  for (Eigen::Index round = 0; round < k; ++round) {
    // Direction: the coordinate axis with the largest component orthogonal
    // to the spread collected so far.
    Matrix residual = Matrix::Identity(k, k);
    if (basis.cols() > 0) residual -= basis * basis.transpose();
    Eigen::Index axis = 0;
    residual.colwise().norm().maxCoeff(&axis);
    const Vector direction = residual.col(axis).normalized();
    const Vector extent = points.transpose() * direction;
    Eigen::Index hi = 0;
    Eigen::Index lo = 0;
    for (Eigen::Index i = 1; i < n; ++i) {
      if (extent[i] > extent[hi]) hi = i;
      if (extent[i] < extent[lo]) lo = i;
    }
    add(static_cast<std::size_t>(hi));
    add(static_cast<std::size_t>(lo));
    Vector diff = points.col(hi) - points.col(lo);
    if (basis.cols() > 0) diff -= basis * (basis.transpose() * diff);
    const double norm = diff.norm();
    if (norm <= 1e-12) break;
    basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
    basis.col(basis.cols() - 1) = diff / norm;
  }
  std::sort(chosen.begin(), chosen.end());
  std::vector<SparseDistribution::Atom> atoms;
  for (std::size_t i : chosen) atoms.emplace_back(i, 1.0 / static_cast<double>(chosen.size()));
  return SparseDistribution(std::move(atoms));
}

namespace {

struct ProjectedProblem {
  Matrix points;  // k x n, coordinates of a_i - a_0 in an orthonormal span basis
  Vector linear;  // gamma <a_i - a_0, theta_hat>
  Matrix basis;
};

ProjectedProblem project(const ActionSet& actions, const Vector& theta_hat, double gamma) {
  if (static_cast<std::size_t>(theta_hat.size()) != actions.ambient_dim())
    throw ConfigError("logdet-barrier: predictor dimension does not match actions");
  ProjectedProblem prob;
  prob.basis = affine_basis(actions);
  const auto n = static_cast<Eigen::Index>(actions.size());
  prob.points.resize(prob.basis.cols(), n);
  for (Eigen::Index i = 0; i < n; ++i)
    prob.points.col(i) = prob.basis.transpose() * (actions[static_cast<std::size_t>(i)] - actions[0]);
  const Vector theta = gamma * (prob.basis.transpose() * theta_hat);
  prob.linear = prob.points.transpose() * theta;
  return prob;
}

}  // namespace

LogdetSolution logdet_barrier_solve(const ActionSet& actions, const Vector& theta_hat,
                                    double gamma, double eta, const LogdetOptions& options) {
  if (actions.size() == 0) throw ContractViolation("logdet-barrier: empty action set");
  if (!(gamma > 0.0)) throw ContractViolation("logdet-barrier: gamma must be positive");
  if (!(eta > 0.0)) throw ContractViolation("logdet-barrier: eta must be positive");

  ProjectedProblem prob = project(actions, theta_hat, gamma);
  const auto k = static_cast<std::size_t>(prob.basis.cols());
  LogdetSolution out;
  out.report.affine_dim = k;
  if (k == 0) {
    out.dist = SparseDistribution::point_mass(0);
    out.report.eta_achieved = 0.0;
    return out;
  }

  const std::size_t n = actions.size();
  const double lifted_dim = static_cast<double>(k + 1);
  SparseDistribution p0 = options.initial ? *options.initial
                          : n <= 4 * k    ? SparseDistribution::uniform(n)
                                          : greedy_initial_distribution(prob.points);
  out.report.initial_support = p0.support_size();
  out.report.iteration_cap =
      options.iteration_cap.value_or(frank_wolfe_iteration_cap(k, gamma, eta));
  const std::size_t refresh_period = 2 * (k + 1);
  const std::size_t best_linear = argmin_index(prob.linear);

  LiftedState state(std::move(prob.points), std::move(prob.linear));
  state.initialize(p0);
  out.report.objective_trace.push_back(state.objective());

  auto take_step = [&](std::size_t j, double norm, double eta_k) {
    const double gap = state.linear(j) - state.mean_linear();
    const auto [x, gain] = line_search_step(norm, gap, lifted_dim);
    const double before = state.objective();
    state.mix_toward(j, x);
    ++out.report.iterations;
    if (out.report.iterations % refresh_period == 0) state.refresh();
    // Round-off must not show up as an increase.
    out.report.objective_trace.push_back(std::min(state.objective(), before));
    out.report.step_eta.push_back(eta_k);
    (void)gain;
  };

  RoundingCheck verdict;
  while (true) {
    // Correction toward argmin <a, theta> keeps every denominator >= 1.
    if (lifted_dim + state.linear(best_linear) - state.mean_linear() < 1.0 &&
        out.report.iterations < out.report.iteration_cap) {
      const Vector norms = state.lifted_norms();
      take_step(best_linear, norms[static_cast<Eigen::Index>(best_linear)], -1.0);
    }
    verdict = state.check(eta);
    if (verdict.passed) break;
    if (out.report.iterations >= out.report.iteration_cap) {
      out.report.cap_hit = true;
      break;
    }
    take_step(verdict.worst_action_index,
              state.lifted_norms()[static_cast<Eigen::Index>(verdict.worst_action_index)],
              verdict.worst_eta);
  }
  out.report.eta_achieved = verdict.worst_eta;
  out.report.worst_action_index = verdict.worst_action_index;
  out.dist = state.distribution();
  return out;
}

RoundingCheck eta_rounding_check(const SparseDistribution& p, const ActionSet& actions,
                                 const Vector& theta_hat, double gamma, double eta) {
  ProjectedProblem prob = project(actions, theta_hat, gamma);
  const auto k = prob.basis.cols();
  const auto n = static_cast<Eigen::Index>(actions.size());
  Matrix lifted(k + 1, n);
  lifted.topRows(k) = prob.points;
  lifted.row(k).setOnes();

  Matrix second = Matrix::Zero(k + 1, k + 1);
  double mean_linear = 0.0;
  for (const auto& [index, prob_mass] : p.support()) {
    if (index >= actions.size()) throw ContractViolation("eta_rounding_check: index out of range");
    const auto col = lifted.col(static_cast<Eigen::Index>(index));
    second.noalias() += prob_mass * col * col.transpose();
    mean_linear += prob_mass * prob.linear[static_cast<Eigen::Index>(index)];
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(second);
  const Vector& lambda = eig.eigenvalues();
  const double floor = 1e-12 * std::max(1.0, lambda.maxCoeff());

  RoundingCheck out;
  out.passed = true;
  out.worst_eta = -std::numeric_limits<double>::infinity();
  out.min_denominator = std::numeric_limits<double>::infinity();
  const double lifted_dim = static_cast<double>(k + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector coeff = eig.eigenvectors().transpose() * lifted.col(i);
    double norm = 0.0;
    for (Eigen::Index j = 0; j < coeff.size(); ++j) {
      if (lambda[j] > floor) {
        norm += coeff[j] * coeff[j] / lambda[j];
      } else if (std::abs(coeff[j]) > 1e-9) {
        norm = std::numeric_limits<double>::infinity();
        break;
      }
    }
    const double den = lifted_dim + prob.linear[i] - mean_linear;
    out.min_denominator = std::min(out.min_denominator, den);
    const double ratio = norm / den - 1.0;
    if (ratio > out.worst_eta) {
      out.worst_eta = ratio;
      out.worst_action_index = static_cast<std::size_t>(i);
    }
  }
  if (out.min_denominator < 1.0)
    throw ContractViolation("eta_rounding_check: denominator below one; correction step missing");
  out.passed = out.worst_eta <= eta;
  return out;
}

}  // namespace adaptcb
