#include <doctest.h>

#include <cmath>

#include "adaptcb/oracles.hpp"

using namespace adaptcb;

namespace {

// Brute-force projection in the A-norm: minimize over the unit sphere by
// dense angular search (2-d only).
Vector project_2d_by_search(const Matrix& a, const Vector& y) {
  double best = 1e300;
  Vector arg = Vector::Zero(2);
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * M_PI * i / n;
    const Vector x = (Vector(2) << std::cos(t), std::sin(t)).finished();
    const double v = (x - y).dot(a * (x - y));
    if (v < best) {
      best = v;
      arg = x;
    }
  }
  return arg;
}

}  // namespace

TEST_CASE("first ONS step by hand") {
  // A_1 = I + g g^T with g = 2 (0 - 1) e1 = -2 e1, so A^{-1} g = -2/5 e1 and
  // the iterate moves to +2/5 e1.
  OnlineNewtonStep ons(2, {});
  ons.step((Vector(2) << 1, 0).finished(), 1.0, 1.0);
  CHECK(ons.parameter()[0] == doctest::Approx(0.4));
  CHECK(ons.parameter()[1] == doctest::Approx(0.0));
  CHECK(ons.precond()(0, 0) == doctest::Approx(5.0));
}

TEST_CASE("weights scale the gradient") {
  OnlineNewtonStep a(2, {}), b(2, {});
  const Vector x = (Vector(2) << 0.6, 0.8).finished();
  a.step(x, 0.5, 2.0);
  b.step(x, 0.5, 1.0);
  // g = 2 w r x; with w = 2 the preconditioner gains 4x the outer product.
  CHECK((a.precond() - Matrix::Identity(2, 2) - 4.0 * (b.precond() - Matrix::Identity(2, 2))).norm() <
        1e-12);
}

TEST_CASE("zero residual leaves the state untouched") {
  OnlineNewtonStep ons(3, {});
  ons.step(Vector::Unit(3, 1), 0.0, 1.0);
  CHECK(ons.parameter().norm() == 0.0);
  CHECK((ons.precond() - Matrix::Identity(3, 3)).norm() == 0.0);
}

TEST_CASE("generalized projection matches a brute-force search") {
  RngStream rng(1);
  for (int i = 0; i < 10; ++i) {
    OnsParams p;
    p.step_scale = 5.0;
    OnlineNewtonStep ons(2, p);
    for (int t = 0; t < 5; ++t) ons.step(rng.unit_vector(2), rng.uniform(-1, 1), 1.0);
    // Drive a step that must leave the ball, then compare with the search.
    const Vector before = ons.parameter();
    const Vector x = rng.unit_vector(2);
    const double loss = x.dot(before) + 3.0;
    const Vector g = 2.0 * (x.dot(before) - loss) * x;
    const Matrix a = ons.precond() + g * g.transpose();
    const Vector y = before - p.step_scale * a.inverse() * g;
    ons.step(x, loss, 1.0);
    if (y.norm() <= 1.0) continue;
    const Vector ref = project_2d_by_search(a, y);
    CHECK((ons.parameter() - ref).norm() < 1e-3);
    CHECK(ons.parameter().norm() <= 1.0 + kUnitBallSlack);
  }
}

TEST_CASE("ONS recovers a planted parameter") {
  RngStream rng(2);
  const Vector star = 0.7 * rng.unit_vector(4);
  OnsOracle oracle(4);
  for (int t = 0; t < 5000; ++t) {
    const Vector a = rng.unit_vector(4);
    oracle.update({1.0, Vector(), a, a.dot(star) + rng.uniform(-0.1, 0.1)});
  }
  CHECK((oracle.predict(Vector()) - star).norm() < 0.05);
  oracle.reset();
  CHECK(oracle.predict(Vector()).norm() == 0.0);
}

TEST_CASE("feature-mapped oracle predicts Theta x") {
  RngStream rng(3);
  Matrix theta_star(3, 2);
  theta_star << 0.3, -0.1, 0.0, 0.2, -0.2, 0.1;
  FeatureMappedOnsOracle oracle(3, 2);
  for (int t = 0; t < 6000; ++t) {
    const Vector x = rng.unit_vector(2);
    const Vector a = rng.unit_vector(3);
    oracle.update({1.0, x, a, a.dot(theta_star * x)});
  }
  const Vector x = (Vector(2) << 0.6, -0.8).finished();
  CHECK((oracle.predict(x) - theta_star * x).norm() < 0.05);
  CHECK_THROWS_AS(oracle.predict(Vector::Zero(3)), ConfigError);
  CHECK(dynamic_cast<FeatureMappedOnsOracle*>(make_linear_oracle(3, 2).get()) != nullptr);
  CHECK(dynamic_cast<OnsOracle*>(make_linear_oracle(3, 0).get()) != nullptr);
}

TEST_CASE("clones are independent") {
  OnsOracle a(2);
  a.update({1.0, Vector(), Vector::Unit(2, 0), 1.0});
  auto b = a.clone();
  a.update({1.0, Vector(), Vector::Unit(2, 1), 1.0});
  CHECK(b->predict(Vector())[1] == 0.0);
  CHECK(a.predict(Vector())[1] != 0.0);
}

TEST_CASE("weighted reduction: reset trace") {
  WeightedReduction red(std::make_unique<OnsOracle>(2));
  RngStream coin(4);
  // Weights 1, 1.5, 3, 2, 7: resets at 1 (w_max 2), 3 (w_max 6), 7 (w_max 14).
  const double weights[] = {1.0, 1.5, 3.0, 2.0, 7.0};
  const double expect_wmax[] = {2.0, 2.0, 6.0, 6.0, 14.0};
  const std::size_t expect_resets[] = {1, 1, 2, 2, 3};
  for (int i = 0; i < 5; ++i) {
    red.update({weights[i], Vector(), Vector::Unit(2, 0), 0.5}, coin);
    CHECK(red.w_max() == expect_wmax[i]);
    CHECK(red.reset_count() == expect_resets[i]);
  }
}

TEST_CASE("weighted reduction: update decisions replay the coin") {
  WeightedReduction red(std::make_unique<OnsOracle>(2));
  RngStream coin(5), replay(5), weights(6);
  for (int t = 0; t < 2000; ++t) {
    const double w = weights.uniform(0.1, 1.0);
    red.observe_weight(w);
    const double prob = w / red.w_max();
    const bool updated = red.update({w, Vector(), Vector::Unit(2, t % 2), 0.3}, coin);
    CHECK(updated == (replay.uniform() < prob));
  }
}

TEST_CASE("weighted reduction: a reset restores a fresh inner oracle") {
  WeightedReduction red(std::make_unique<OnsOracle>(2));
  RngStream coin(7);
  for (int t = 0; t < 50; ++t) red.update({1.0, Vector(), Vector::Unit(2, 0), 1.0}, coin);
  CHECK(red.inner().predict(Vector()).norm() > 0.0);
  const Vector p = red.predict(5.0, Vector());
  CHECK(p.norm() == 0.0);
  CHECK(red.w_max() == 10.0);
  CHECK_THROWS_AS(red.observe_weight(-1.0), ContractViolation);
}
