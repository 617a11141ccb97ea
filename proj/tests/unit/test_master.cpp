#include <doctest.h>

#include <cmath>

#include "adaptcb/master.hpp"

using namespace adaptcb;

namespace {

// Bisection on sum_i (eta (L_i - lambda))^-2 = 1 over lambda < min L.
Vector tsallis_by_bisection(const Vector& l, double eta) {
  double hi = l.minCoeff() - 1e-12;
  double lo = l.minCoeff() - 10.0 * std::sqrt(double(l.size())) / eta;
  auto mass = [&](double lam) { return (eta * (l.array() - lam)).square().inverse().sum(); };
  for (int i = 0; i < 400; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mass(mid) > 1.0 ? hi : lo) = mid;
  }
  const Vector p = (eta * (l.array() - 0.5 * (lo + hi))).square().inverse().matrix();
  return p / p.sum();
}

}  // namespace

TEST_CASE("tsallis solve against bisection") {
  RngStream rng(1);
  for (int i = 0; i < 100; ++i) {
    const auto m = static_cast<Eigen::Index>(1 + rng.uniform_index(12));
    Vector l(m);
    for (Eigen::Index j = 0; j < m; ++j) l[j] = rng.uniform(0.0, 200.0);
    const double eta = std::exp(rng.uniform(std::log(1e-3), std::log(2.0)));
    double lambda = 0.0;
    const Vector p = tsallis_solve(l, eta, &lambda);
    CHECK((p - tsallis_by_bisection(l, eta)).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(lambda < l.minCoeff());
    CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("tsallis solve special cases") {
  const Vector p = tsallis_solve(Vector::Constant(4, 3.0), 0.5);
  CHECK((p - Vector::Constant(4, 0.25)).norm() < 1e-12);
  // Two arms with a gap: sqrt-law closed form p_i = 1 / (eta (L_i - lambda))^2.
  double lambda = 0.0;
  const Vector q = tsallis_solve((Vector(2) << 0.0, 10.0).finished(), 1.0, &lambda);
  CHECK(q[0] == doctest::Approx(1.0 / (lambda * lambda)).epsilon(1e-10));
  CHECK(q[0] > 0.9);
  CHECK_THROWS_AS(tsallis_solve(Vector(), 1.0), ContractViolation);
  CHECK_THROWS_AS(tsallis_solve(Vector::Zero(2), 0.0), ContractViolation);
  CHECK(tsallis_default_rate(50) == doctest::Approx(0.1));
}

TEST_CASE("unhedged master never biases") {
  HedgedTsallisInf m(5, 0.05, 0.5, 0.0);
  RngStream rng(2);
  for (int t = 0; t < 500; ++t) {
    const MasterDraw d = m.sample(rng);
    CHECK_FALSE(m.update(d.arm == 0 ? 0.0 : 2.0).triggered);
  }
  CHECK(m.ledger().norm() == 0.0);
  CHECK(m.play_distribution()[0] > 0.5);
}

TEST_CASE("master contracts") {
  HedgedTsallisInf m(3, 0.1, 0.5, 1.0);
  CHECK_THROWS_AS(m.update(1.0), ContractViolation);
  RngStream rng(3);
  m.sample(rng);
  CHECK_THROWS_AS(m.update(2.5), ContractViolation);
  CHECK_THROWS_AS(HedgedTsallisInf(0, 0.1, 0.5, 1.0), ConfigError);
  CHECK_THROWS_AS(HedgedTsallisInf(3, 0.1, 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(HedgedTsallisInf(3, 0.1, 0.5, -1.0), ConfigError);
}

TEST_CASE("initial ledger is M^alpha R") {
  HedgedTsallisInf m(4, 0.1, 0.5, 3.0);
  CHECK(m.initial_ledger()[2] == doctest::Approx(6.0));
  CHECK(m.rho_including_next()[0] == doctest::Approx(4.0));
}

TEST_CASE("hedged ledger identity and bias range") {
  RngStream rng(4);
  std::size_t events = 0;
  for (int run = 0; run < 6; ++run) {
    const std::size_t arms = 2 + rng.uniform_index(6);
    HedgedTsallisInf m(arms, tsallis_default_rate(1500), 0.5, rng.uniform(20.0, 200.0));
    Vector means(static_cast<Eigen::Index>(arms));
    for (Eigen::Index i = 0; i < means.size(); ++i) means[i] = rng.uniform(0.2, 1.8);
    Vector prev_rho = m.rho();
    for (int t = 0; t < 1500; ++t) {
      const MasterDraw d = m.sample(rng);
      CHECK(d.prob == doctest::Approx(1.0 / m.rho()[static_cast<Eigen::Index>(d.arm)]).epsilon(1.0));
      for (Eigen::Index i = 0; i < m.rho().size(); ++i) REQUIRE(m.rho()[i] >= prev_rho[i]);
      prev_rho = m.rho();
      const BiasEvent ev = m.update(rng.bernoulli(0.5 * means[static_cast<Eigen::Index>(d.arm)]) ? 2.0 : 0.0);
      if (ev.triggered) {
        ++events;
        CHECK(ev.bias >= 0.0);
        CHECK(ev.bias <= ev.estimate);
        const auto a = static_cast<Eigen::Index>(ev.arm);
        const double want = m.hedge() * std::pow(m.rho_including_next()[a], m.alpha());
        CHECK(m.ledger()[a] == doctest::Approx(want).epsilon(1e-9));
      }
    }
  }
  CHECK(events > 0);
}

TEST_CASE("rho is the running max of inverse play probabilities") {
  HedgedTsallisInf m(3, 0.2, 0.5, 0.0);
  RngStream rng(5);
  Vector expect = Vector::Ones(3);
  for (int t = 0; t < 200; ++t) {
    expect = expect.cwiseMax(m.play_distribution().cwiseInverse());
    const MasterDraw d = m.sample(rng);
    CHECK((m.rho() - expect).norm() < 1e-12);
    CHECK(d.rho == expect[static_cast<Eigen::Index>(d.arm)]);
    m.update(d.arm == 1 ? 0.0 : 1.0);
  }
}
