#include "adaptcb/checks.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "adaptcb/aggregation.hpp"
#include "adaptcb/environment.hpp"
#include "adaptcb/master.hpp"
#include "adaptcb/oracles.hpp"
#include "adaptcb/selection.hpp"

namespace adaptcb {

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

Vector uniform_vector(std::size_t n, double lo, double hi, RngStream& rng) {
  Vector v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.uniform(lo, hi);
  return v;
}

ActionSet random_actions(std::size_t n, std::size_t d, RngStream& rng) {
  std::vector<Vector> acts;
  for (std::size_t i = 0; i < n; ++i) acts.push_back(rng.uniform() * rng.unit_vector(d));
  return ActionSet(std::move(acts));
}

// ---- selectors -------------------------------------------------------------

Outcome log_barrier_minimax() {
  RngStream rng(11);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const std::size_t k = 2 + rng.uniform_index(5);
    const Vector theta = uniform_vector(k, -1.0, 1.0, rng);
    const double gamma = rng.uniform(1.0, 100.0);
    const auto sol = log_barrier(theta, gamma);
    const auto value = minimax_value(sol.dist, theta, gamma, ActionSet::basis(k));
    worst = std::max(worst, std::abs(value.value - static_cast<double>(k - 1) / gamma));
  }
  return {worst <= 1e-6, "max |value - (K-1)/gamma| = " + num(worst)};
}

Outcome log_barrier_kkt() {
  RngStream rng(12);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const std::size_t k = 2 + rng.uniform_index(7);
    const Vector theta = uniform_vector(k, -1.0, 1.0, rng);
    const double gamma = rng.uniform(0.5, 200.0);
    const Vector p = log_barrier(theta, gamma).dist.to_dense(k);
    const Eigen::ArrayXd c = theta.array() - 1.0 / (gamma * p.array());
    worst = std::max(worst, c.maxCoeff() - c.minCoeff());
  }
  return {worst <= 1e-8, "max spread of theta_i - 1/(gamma p_i) = " + num(worst)};
}

Outcome igw_band() {
  RngStream rng(13);
  for (int i = 0; i < 50; ++i) {
    const std::size_t k = 2 + rng.uniform_index(7);
    const Vector theta = uniform_vector(k, -1.0, 1.0, rng);
    const double gamma = rng.uniform(1.0, 100.0);
    const Vector p = igw(theta, gamma).to_dense(k);
    Eigen::Index top = 0;
    p.maxCoeff(&top);
    if (static_cast<std::size_t>(top) != argmin_index(theta)) return {false, "leader mismatch"};
    const auto value =
        minimax_value(SparseDistribution::from_dense(p), theta, gamma, ActionSet::basis(k));
    if (value.value > 5.0 * static_cast<double>(k) / gamma)
      return {false, "value " + num(value.value) + " above 5K/gamma"};
  }
  return {true, "50 instances"};
}

Outcome rounding_certificate() {
  RngStream rng(14);
  const double eta = 0.5;
  double worst_ratio = 0.0;
  for (int i = 0; i < 20; ++i) {
    const std::size_t d = 1 + rng.uniform_index(8);
    const std::size_t n = 2 + rng.uniform_index(100);
    const ActionSet acts = random_actions(n, d, rng);
    const Vector theta = 0.9 * rng.unit_vector(d);
    const double gamma = rng.uniform(1.0, 200.0);
    const double rate = gamma / (1.0 + eta);
    const auto sol = logdet_barrier_solve(acts, theta, rate, eta);
    if (sol.report.cap_hit) return {false, "iteration cap hit"};
    const auto check = eta_rounding_check(sol.dist, acts, theta, rate, eta);
    if (!check.passed) return {false, "rounding test failed, eta = " + num(check.worst_eta)};
    const double dim = static_cast<double>(acts.affine_dim());
    if (dim == 0) continue;
    // Rounding at gamma / (1 + eta) certifies the game value at gamma.
    const auto value = minimax_value(sol.dist, theta, gamma, acts);
    worst_ratio = std::max(worst_ratio, value.value / ((1.0 + 2.0 * eta) * dim / gamma));
  }
  return {worst_ratio <= 1.0, "max value / ((1+2eta) dim / gamma) = " + num(worst_ratio)};
}

Outcome fw_monotone() {
  RngStream rng(15);
  std::size_t violations = 0;
  for (int i = 0; i < 30; ++i) {
    const std::size_t d = 1 + rng.uniform_index(6);
    const ActionSet acts = random_actions(5 + rng.uniform_index(60), d, rng);
    const auto sol = logdet_barrier_solve(acts, rng.unit_vector(d), rng.uniform(1.0, 100.0),
                                          rng.uniform(0.05, 1.0));
    const auto& tr = sol.report.objective_trace;
    for (std::size_t k = 1; k < tr.size(); ++k)
      if (tr[k] > tr[k - 1]) ++violations;
  }
  return {violations == 0, std::to_string(violations) + " increases"};
}

Outcome logdet_one_dim() {
  const ActionSet acts({Vector::Constant(1, -1.0), Vector::Constant(1, 1.0)});
  const auto sol = logdet_barrier_solve(acts, Vector::Constant(1, 1.0), 2.0, 0.05);
  const double mean = moments(sol.dist, acts).mean_action[0];
  const double target = (1.0 - std::sqrt(5.0)) / 2.0;
  return {std::abs(mean - target) <= 0.02, "mean action " + num(mean)};
}

// ---- master ----------------------------------------------------------------

Outcome ledger_identity() {
  RngStream rng(21);
  double worst = 0.0;
  std::size_t events = 0;
  for (int run = 0; run < 5; ++run) {
    const std::size_t m = 2 + rng.uniform_index(6);
    const std::size_t horizon = 1000;
    HedgedTsallisInf master(m, tsallis_default_rate(horizon), 0.5,
                            corral_hedge(2.0, static_cast<double>(horizon), 10.0));
    const Vector means = uniform_vector(m, 0.0, 2.0, rng);
    for (std::size_t t = 0; t < horizon; ++t) {
      const MasterDraw draw = master.sample(rng);
      const double loss = rng.bernoulli(0.5 * means[static_cast<Eigen::Index>(draw.arm)]) ? 2.0 : 0.0;
      const BiasEvent ev = master.update(loss);
      if (ev.triggered) {
        ++events;
        if (ev.bias < 0.0 || ev.bias > ev.estimate) return {false, "bias outside [0, ell_hat]"};
      }
      const Vector rho = master.rho_including_next();
      for (std::size_t i = 0; i < m; ++i) {
        const auto j = static_cast<Eigen::Index>(i);
        const double expect = master.biased()[i]
                                  ? master.hedge() * std::pow(rho[j], master.alpha())
                                  : master.initial_ledger()[j];
        worst = std::max(worst, std::abs(master.ledger()[j] - expect) / std::max(1.0, expect));
      }
    }
  }
  return {worst <= 1e-6, num(static_cast<double>(events)) + " events, max rel gap " + num(worst)};
}

Outcome tsallis_regret_bound() {
  const std::size_t m = 10, horizon = 2000;
  const double bound = 4.0 * std::sqrt(2.0 * m * horizon);
  double mean = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    RngStream rng(100 + seed);
    HedgedTsallisInf master(m, tsallis_default_rate(horizon), 0.5, 0.0);
    Vector cum = Vector::Zero(m);
    double played = 0.0;
    for (std::size_t t = 0; t < horizon; ++t) {
      Vector means = Vector::Constant(m, 1.2);
      means[0] = 0.8;
      const Vector p = master.play_distribution();
      played += p.dot(means);
      cum += means;
      const MasterDraw draw = master.sample(rng);
      master.update(rng.bernoulli(0.5 * means[static_cast<Eigen::Index>(draw.arm)]) ? 2.0 : 0.0);
    }
    mean += (played - cum.minCoeff()) / 5.0;
  }
  return {mean <= bound, "pseudo-regret " + num(mean) + " vs bound " + num(bound)};
}

Outcome tsallis_shift() {
  RngStream rng(22);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const Vector l = uniform_vector(2 + rng.uniform_index(10), 0.0, 50.0, rng);
    const double c = rng.uniform(-100.0, 100.0);
    const Vector p = tsallis_solve(l, 0.1);
    const Vector q = tsallis_solve((l.array() + c).matrix(), 0.1);
    worst = std::max(worst, (p - q).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-9, "max shift gap " + num(worst)};
}

Outcome estimator_unbiased() {
  RngStream rng(23);
  const Vector p = (Vector(4) << 0.1, 0.2, 0.3, 0.4).finished();
  const Vector loss = (Vector(4) << 1.5, 0.5, 2.0, 1.0).finished();
  const auto dist = SparseDistribution::from_dense(p);
  const int n = 100000;
  Vector sum = Vector::Zero(4), sum_sq = Vector::Zero(4);
  for (int k = 0; k < n; ++k) {
    const auto i = static_cast<Eigen::Index>(dist.sample(rng));
    const double est = loss[i] / p[i];
    sum[i] += est;
    sum_sq[i] += est * est;
  }
  for (Eigen::Index i = 0; i < 4; ++i) {
    const double mean = sum[i] / n;
    const double sd = std::sqrt((sum_sq[i] / n - mean * mean) / n);
    if (std::abs(mean - loss[i]) > 3.0 * sd + 1e-12)
      return {false, "arm " + std::to_string(i) + " mean " + num(mean)};
  }
  return {true, "4 arms within 3 sigma"};
}

// ---- oracle ----------------------------------------------------------------

Outcome ons_inverse() {
  RngStream rng(31);
  double worst = 0.0;
  for (std::size_t d : {2u, 5u, 8u}) {
    OnlineNewtonStep ons(d, {});
    const Vector star = 0.8 * rng.unit_vector(d);
    for (int t = 0; t < 1000; ++t) {
      const Vector a = rng.unit_vector(d);
      ons.step(a, a.dot(star) + rng.uniform(-0.2, 0.2), 1.0);
      if (ons.parameter().norm() > 1.0 + kUnitBallSlack) return {false, "iterate left the ball"};
    }
    const Matrix direct = ons.precond().inverse();
    worst = std::max(worst, (ons.precond_inverse() - direct).norm() / direct.norm());
  }
  return {worst <= 1e-6, "max relative inverse error " + num(worst)};
}

Outcome reduction_rate() {
  RngStream rng(32);
  RngStream coin(33);
  WeightedReduction red(std::make_unique<OnsOracle>(3));
  double expected = 0.0;
  const int n = 10000;
  for (int t = 0; t < n; ++t) {
    const double w = rng.uniform();
    red.observe_weight(w);
    const double prob = w / red.w_max();
    expected += prob;
    red.update({w, Vector(), rng.unit_vector(3), 0.0}, coin);
  }
  // Variance of a sum of independent Bernoullis is at most the sum of p.
  const double sd = std::sqrt(expected);
  const double got = static_cast<double>(red.inner_update_count());
  return {std::abs(got - expected) <= 3.0 * sd,
          "updates " + num(got) + " vs expected " + num(expected)};
}

Outcome reduction_constant() {
  RngStream coin(34);
  WeightedReduction red(std::make_unique<OnsOracle>(2));
  for (int t = 0; t < 100; ++t) {
    red.update({0.7, Vector(), Vector::Unit(2, 0), 0.5}, coin);
    if (red.w_max() != 1.4) return {false, "w_max drifted"};
  }
  return {red.reset_count() == 1, "resets " + std::to_string(red.reset_count())};
}

// ---- env -------------------------------------------------------------------

EnvSpec sphere_spec(double eps) {
  EnvSpec s;
  s.dim = 5;
  s.horizon = 500;
  s.eps = eps;
  s.action_count = 20;
  return s;
}

Outcome env_oblivious() {
  const Environment a(sphere_spec(0.1), 5), b(sphere_spec(0.1), 5);
  for (std::size_t t = 1; t <= 200; ++t) {
    const Round ra = b.emit(t);
    const Round rb = a.emit(t);
    for (std::size_t i = 0; i < ra.actions.size(); ++i)
      if (ra.actions[i] != rb.actions[i]) return {false, "action sets differ"};
    if (a.loss(ra, t % ra.actions.size()) != b.loss(rb, t % rb.actions.size()))
      return {false, "noise differs"};
  }
  return {true, "200 rounds bit-identical"};
}

double eps_upper_of(const Environment& env) {
  double sum = 0.0;
  const auto T = env.spec().horizon;
  for (std::size_t t = 1; t <= T; ++t) sum += env.truth(env.emit(t), 0).misspec_sup_sq;
  return std::sqrt(sum / static_cast<double>(T));
}

Outcome env_eps_band() {
  const double eps = 0.2;
  const double clean = eps_upper_of(Environment(sphere_spec(0.0), 3));
  const double up = eps_upper_of(Environment(sphere_spec(eps), 3));
  return {clean == 0.0 && up <= eps && up >= 0.5 * eps,
          "eps_upper " + num(up) + " at eps " + num(eps) + ", clean " + num(clean)};
}

Outcome env_corrupted() {
  EnvSpec s = sphere_spec(0.8);
  s.shape = MisspecShape::corrupted_rounds;
  s.corrupted = 20;
  const double up = eps_upper_of(Environment(s, 4));
  const double bound = std::sqrt(20.0 / 500.0);
  return {up <= bound, "eps_upper " + num(up) + " vs sqrt(C/T) " + num(bound)};
}

Outcome env_subspace() {
  EnvSpec s = sphere_spec(0.0);
  s.dim = 10;
  s.actions = ActionGen::low_dim_subspace;
  s.subspace_schedule = {2};
  const Environment env(s, 6);
  for (std::size_t t = 1; t <= 100; ++t)
    if (env.emit(t).actions.affine_dim() != 2) return {false, "round " + std::to_string(t)};
  return {true, "affine dim 2 on 100 rounds"};
}

struct Entry {
  const char* suite;
  const char* name;
  std::function<Outcome()> run;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = {
      {"selectors", "(K-1)/gamma exact minimax value", log_barrier_minimax},
      {"selectors", "log-barrier KKT identity", log_barrier_kkt},
      {"selectors", "igw leader and minimax band 5K/gamma", igw_band},
      {"selectors", "eta-rounding certificate", rounding_certificate},
      {"selectors", "Frank-Wolfe objective non-increasing", fw_monotone},
      {"selectors", "one-dimensional logdet optimum", logdet_one_dim},
      {"master", "ledger identity", ledger_identity},
      {"master", "Tsallis-INF bound 4 sqrt(2MT) at R=0", tsallis_regret_bound},
      {"master", "tsallis_solve shift invariance", tsallis_shift},
      {"master", "importance-weighted estimator unbiased", estimator_unbiased},
      {"oracle", "ONS rank-one inverse and unit-ball iterate", ons_inverse},
      {"oracle", "weighted reduction update rate", reduction_rate},
      {"oracle", "constant weights: single reset", reduction_constant},
      {"env", "oblivious streams", env_oblivious},
      {"env", "sinusoidal eps_upper in [eps/2, eps]", env_eps_band},
      {"env", "corrupted rounds eps_upper <= sqrt(C/T)", env_corrupted},
      {"env", "low_dim_subspace affine dimension", env_subspace},
  };
  return entries;
}

}  // namespace

std::vector<CheckResult> run_checks(const std::string& suite) {
  static const char* suites[] = {"selectors", "master", "oracle", "env", "all"};
  if (std::find(std::begin(suites), std::end(suites), suite) == std::end(suites))
    throw ConfigError("unknown check suite: " + suite);
  std::vector<CheckResult> out;
  for (const auto& e : registry()) {
    if (suite != "all" && suite != e.suite) continue;
    CheckResult r{e.suite, e.name, false, ""};
    try {
      const Outcome o = e.run();
      r.passed = o.passed;
      r.detail = o.detail;
    } catch (const std::exception& ex) {
      r.detail = std::string("exception: ") + ex.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace adaptcb
