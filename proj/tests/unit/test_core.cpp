#include <doctest.h>

#include <cmath>
#include <map>

#include "adaptcb/core.hpp"

using namespace adaptcb;

TEST_CASE("rng streams are reproducible and keyed") {
  RngStream a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs = differs || x != c.next_u64();
  }
  CHECK(differs);

  RngStream d1 = RngStream::derive(7, 1, 5), d2 = RngStream::derive(7, 1, 5);
  RngStream d3 = RngStream::derive(7, 1, 6), d4 = RngStream::derive(7, 2, 5);
  const double u = d1.uniform();
  CHECK(u == d2.uniform());
  CHECK(u != d3.uniform());
  CHECK(u != d4.uniform());
}

TEST_CASE("rng draws respect their ranges") {
  RngStream rng(1);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    REQUIRE(rng.uniform_index(7) < 7);
  }
  CHECK(sum / 20000 == doctest::Approx(0.5).epsilon(0.02));
  const Vector v = rng.unit_vector(6);
  CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(rng.uniform_index(0), ContractViolation);
}

TEST_CASE("normal draws have unit variance") {
  RngStream rng(9);
  double s = 0.0, s2 = 0.0;
  const int n = 50000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  CHECK(std::abs(s / n) < 0.03);
  CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("action set validation") {
  CHECK_THROWS_AS(ActionSet(std::vector<Vector>{}), ContractViolation);
  CHECK_THROWS_AS(ActionSet({Vector::Constant(2, 0.9)}), ContractViolation);
  CHECK_THROWS_AS(ActionSet({Vector::Zero(2), Vector::Zero(3)}), ContractViolation);
  const ActionSet basis = ActionSet::basis(4);
  CHECK(basis.size() == 4);
  CHECK(basis.ambient_dim() == 4);
  CHECK(basis[2][2] == 1.0);
}

TEST_CASE("affine dimension on hand-built sets") {
  // Standard basis in R^k spans a (k-1)-dimensional affine set.
  CHECK(affine_dimension(ActionSet::basis(1)) == 0);
  CHECK(affine_dimension(ActionSet::basis(5)) == 4);
  // Collinear points.
  const Vector dir = (Vector(3) << 1, 2, 2).finished() / 3.0;
  CHECK(affine_dimension(ActionSet({0.1 * dir, -0.5 * dir, 0.9 * dir})) == 1);
  // Identical points.
  CHECK(affine_dimension(ActionSet({0.3 * dir, 0.3 * dir})) == 0);
  // A triangle plus its centroid stays 2-dimensional.
  const Vector p = (Vector(3) << 0.5, 0, 0).finished();
  const Vector q = (Vector(3) << 0, 0.5, 0).finished();
  const Vector r = (Vector(3) << 0, 0, 0.5).finished();
  const ActionSet tri({p, q, r, (p + q + r) / 3.0});
  CHECK(affine_dimension(tri) == 2);
  CHECK(tri.affine_dim() == 2);
  // {-1, +1} on the line.
  CHECK(affine_dimension(ActionSet({Vector::Constant(1, -1), Vector::Constant(1, 1)})) == 1);
}

TEST_CASE("affine basis is orthonormal and spans the differences") {
  RngStream rng(3);
  std::vector<Vector> acts;
  Matrix u = Matrix::Zero(6, 2);
  u(0, 0) = 1;
  u(3, 1) = 1;
  const Vector offset = (Vector(6) << 0, 0.2, 0, 0, 0.1, 0).finished();
  for (int i = 0; i < 10; ++i) acts.push_back(offset + 0.5 * u * rng.unit_vector(2));
  const ActionSet set(acts);
  const Matrix b = affine_basis(set);
  REQUIRE(b.cols() == 2);
  CHECK((b.transpose() * b - Matrix::Identity(2, 2)).norm() < 1e-10);
  for (const auto& a : acts) {
    const Vector diff = a - acts[0];
    CHECK((diff - b * (b.transpose() * diff)).norm() < 1e-10);
  }
}

TEST_CASE("sparse distribution contracts") {
  CHECK_THROWS_AS(SparseDistribution(std::vector<SparseDistribution::Atom>{}), ContractViolation);
  CHECK_THROWS_AS(SparseDistribution({{0, 0.5}, {0, 0.5}}), ContractViolation);
  CHECK_THROWS_AS(SparseDistribution({{0, 0.5}, {1, 0.4}}), ContractViolation);
  CHECK_THROWS_AS(SparseDistribution({{0, 1.2}, {1, -0.2}}), ContractViolation);
  const auto p = SparseDistribution::from_dense((Vector(4) << 0.25, 0, 0.5, 0.25).finished());
  CHECK(p.support_size() == 3);
  CHECK(p.probability(1) == 0.0);
  CHECK(p.probability(2) == 0.5);
  CHECK_THROWS_AS(p.to_dense(2), ContractViolation);
  CHECK(SparseDistribution::uniform(4).probability(3) == 0.25);
  CHECK(SparseDistribution::point_mass(5).to_dense(6)[5] == 1.0);
}

TEST_CASE("sampling frequencies match probabilities") {
  const auto p = SparseDistribution({{3, 0.1}, {0, 0.6}, {7, 0.3}});
  RngStream rng(5);
  std::map<std::size_t, int> counts;
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[p.sample(rng)];
  CHECK(counts.size() == 3);
  for (const auto& [index, prob] : p.support()) {
    const double sd = std::sqrt(prob * (1 - prob) / n);
    CHECK(std::abs(counts[index] / double(n) - prob) < 4 * sd);
  }
  RngStream once(5);
  CHECK(SparseDistribution::point_mass(2).sample(once) == 2);
}

TEST_CASE("moments of a two-point distribution") {
  const ActionSet acts({(Vector(2) << 1, 0).finished(), (Vector(2) << 0, 1).finished()});
  const auto p = SparseDistribution({{0, 0.25}, {1, 0.75}});
  const Moments m = moments(p, acts);
  CHECK(m.mean_action[0] == doctest::Approx(0.25));
  CHECK(m.mean_action[1] == doctest::Approx(0.75));
  CHECK(m.second_moment(0, 0) == doctest::Approx(0.25));
  CHECK(m.second_moment(0, 1) == doctest::Approx(0.0));
  // Var along e1 - e2 is p(1 - p).
  const Matrix cov = m.covariance();
  const Vector e = (Vector(2) << 1, -1).finished();
  CHECK(e.dot(cov * e) == doctest::Approx(4 * 0.25 * 0.75));
}

TEST_CASE("argmin ties go to the lowest index") {
  CHECK(argmin_index((Vector(4) << 3, 1, 1, 2).finished()) == 1);
  CHECK(argmin_index((Vector(1) << 7).finished()) == 0);
}
