#include <doctest.h>

#include <cmath>

#include "adaptcb/environment.hpp"

using namespace adaptcb;

namespace {

EnvSpec sphere(double eps) {
  EnvSpec s;
  s.dim = 5;
  s.horizon = 2000;
  s.eps = eps;
  return s;
}

}  // namespace

TEST_CASE("finite-arm actions are the standard basis") {
  EnvSpec s;
  s.kind = EnvKind::finite_arm;
  s.actions = ActionGen::fixed_basis;
  s.dim = 4;
  const Environment env(s, 1);
  const Round r = env.emit(17);
  REQUIRE(r.actions.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK((r.actions[i] - Vector::Unit(4, i)).norm() == 0.0);
}

TEST_CASE("resampled sphere actions") {
  const Environment env(sphere(0.0), 2);
  for (std::size_t t = 1; t <= 50; ++t) {
    const Round r = env.emit(t);
    CHECK(r.actions.size() == 20);
    CHECK(r.actions.affine_dim() <= 5);
    for (const auto& a : r.actions.actions()) CHECK(a.norm() <= 1.0 + kUnitBallSlack);
  }
}

TEST_CASE("low-dimensional subspaces follow the schedule") {
  EnvSpec s = sphere(0.0);
  s.dim = 10;
  s.actions = ActionGen::low_dim_subspace;
  s.subspace_schedule = {2, 1, 4};
  const Environment env(s, 3);
  for (std::size_t t = 1; t <= 30; ++t)
    CHECK(env.emit(t).actions.affine_dim() == s.subspace_schedule[(t - 1) % 3]);
  s.subspace_schedule = {2};
  const Environment constant(s, 3);
  for (std::size_t t = 1; t <= 30; ++t) CHECK(constant.emit(t).actions.affine_dim() == 2);
}

TEST_CASE("rounds are a pure function of (seed, t)") {
  const Environment a(sphere(0.1), 9), b(sphere(0.1), 9), c(sphere(0.1), 10);
  const Round ra = a.emit(33), rb = b.emit(33), rc = c.emit(33);
  CHECK((ra.actions[4] - rb.actions[4]).norm() == 0.0);
  CHECK((ra.actions[4] - rc.actions[4]).norm() > 0.0);
  CHECK(a.loss(ra, 2) == b.loss(rb, 2));
  // Emitting other rounds first changes nothing.
  a.emit(34);
  CHECK((a.emit(33).actions[0] - ra.actions[0]).norm() == 0.0);
}

TEST_CASE("well-specified means are linear") {
  const Environment env(sphere(0.0), 4);
  const Round r = env.emit(5);
  const Vector f = env.planted(r.context);
  CHECK(f.norm() == doctest::Approx(0.9));
  for (std::size_t i = 0; i < r.actions.size(); ++i)
    CHECK(env.mean_loss(r.context, r.actions[i], 5) == doctest::Approx(r.actions[i].dot(f)).epsilon(1e-15));
}

TEST_CASE("bernoulli noise at mean zero") {
  EnvSpec s = sphere(0.0);
  s.horizon = 100000;
  const Environment env(s, 5);
  Round r;
  r.actions = ActionSet({Vector::Zero(5)});
  double sum = 0.0;
  const int n = 100000;
  for (int t = 1; t <= n; ++t) {
    r.t = static_cast<std::size_t>(t);
    const double l = env.loss(r, 0);
    REQUIRE(std::abs(l) == 1.0);
    sum += l;
  }
  CHECK(std::abs(sum / n) <= 3.0 / std::sqrt(double(n)));
}

TEST_CASE("uniform band noise stays within the margin") {
  EnvSpec s = sphere(0.0);
  s.noise = NoiseKind::uniform_band;
  const Environment env(s, 6);
  for (std::size_t t = 1; t <= 500; ++t) {
    const Round r = env.emit(t);
    const double mu = env.mean_loss(r.context, r.actions[0], t);
    const double l = env.loss(r, 0);
    CHECK(std::abs(l - mu) <= s.margin);
    CHECK(std::abs(l) <= 1.0);
  }
}

TEST_CASE("misspecification stays inside eps") {
  const Environment env(sphere(0.2), 7);
  double sup = 0.0;
  for (std::size_t t = 1; t <= 300; ++t) {
    const Round r = env.emit(t);
    const RoundTruth tr = env.truth(r, 0);
    CHECK(tr.misspec_sup_sq <= 0.04 + 1e-12);
    CHECK(tr.played_mean_loss >= tr.best_mean_loss);
    sup = std::max(sup, tr.misspec_sup_sq);
  }
  CHECK(sup > 0.01);
}

TEST_CASE("corrupted rounds: count and eps_T bound") {
  EnvSpec s = sphere(0.8);
  s.shape = MisspecShape::corrupted_rounds;
  s.corrupted = 37;
  s.horizon = 1000;
  const Environment env(s, 8);
  std::size_t count = 0;
  double acc = 0.0;
  for (std::size_t t = 1; t <= s.horizon; ++t) {
    count += env.corrupted_round(t);
    acc += env.truth(env.emit(t), 0).misspec_sup_sq;
  }
  CHECK(count == 37);
  CHECK(std::sqrt(acc / s.horizon) <= std::sqrt(37.0 / 1000.0));
}

TEST_CASE("contextual environment") {
  EnvSpec s = sphere(0.0);
  s.kind = EnvKind::linear_contextual;
  s.feature_dim = 3;
  const Environment env(s, 9);
  const Round r = env.emit(1);
  CHECK(r.context.size() == 3);
  CHECK(env.planted(r.context).norm() <= 0.9 + 1e-12);
  CHECK_THROWS_AS(env.planted(Vector::Zero(2)), ConfigError);
}

TEST_CASE("spec validation and enum parsing") {
  EnvSpec s = sphere(0.0);
  s.eps = 1.5;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = sphere(0.95);
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = sphere(0.0);
  s.kind = EnvKind::finite_arm;
  s.dim = 1;
  s.actions = ActionGen::fixed_basis;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = sphere(0.0);
  s.actions = ActionGen::low_dim_subspace;
  s.subspace_schedule = {6};
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = sphere(0.0);
  s.feature_dim = 2;
  CHECK_THROWS_AS(s.validate(), ConfigError);

  CHECK(parse_noise_kind("uniform_band") == NoiseKind::uniform_band);
  CHECK(to_string(ActionGen::low_dim_subspace) == "low_dim_subspace");
  CHECK(parse_misspec_shape(to_string(MisspecShape::corrupted_rounds)) ==
        MisspecShape::corrupted_rounds);
  CHECK_THROWS_AS(parse_env_kind("bandit"), ConfigError);
}

TEST_CASE("loss queries outside the action set") {
  const Environment env(sphere(0.0), 10);
  const Round r = env.emit(1);
  CHECK_THROWS_AS(env.loss(r, 20), ContractViolation);
  CHECK_THROWS_AS(env.truth(r, 99), ContractViolation);
}
