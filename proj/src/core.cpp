#include "adaptcb/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_set>

namespace adaptcb {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

RngStream RngStream::derive(std::uint64_t seed, std::uint64_t tag,
                            std::uint64_t index) {
  std::uint64_t s = seed;
  std::uint64_t key = splitmix64(s);
  s = key ^ (tag * 0xD1B54A32D192ED03ULL);
  key = splitmix64(s);
  s = key ^ (index * 0xABC98388FB8FAC03ULL);
  return RngStream(splitmix64(s));
}

std::uint64_t RngStream::next_u64() { return engine_(); }

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  if (spare_normal_) {
    const double z = *spare_normal_;
    spare_normal_.reset();
    return z;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  spare_normal_ = r * std::sin(phi);
  return r * std::cos(phi);
}

std::size_t RngStream::uniform_index(std::size_t n) {
  if (n == 0) throw ContractViolation("uniform_index: empty range");
  return std::min(n - 1, static_cast<std::size_t>(uniform() * static_cast<double>(n)));
}

Vector RngStream::unit_vector(std::size_t dim) {
  Vector v(static_cast<Eigen::Index>(dim));
  double norm = 0.0;
  do {
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal();
    norm = v.norm();
  } while (norm < 1e-12);
  return v / norm;
}

ActionSet::ActionSet(std::vector<Vector> actions) : actions_(std::move(actions)) {
  if (actions_.empty()) throw ContractViolation("ActionSet: need at least one action");
  dim_ = static_cast<std::size_t>(actions_.front().size());
  for (const auto& a : actions_) {
    if (static_cast<std::size_t>(a.size()) != dim_)
      throw ContractViolation("ActionSet: actions have mixed dimensions");
    if (a.norm() > 1.0 + kUnitBallSlack)
      throw ContractViolation("ActionSet: action outside the unit ball");
  }
}

ActionSet ActionSet::from_columns(const Matrix& m) {
  std::vector<Vector> actions;
  actions.reserve(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index j = 0; j < m.cols(); ++j) actions.emplace_back(m.col(j));
  return ActionSet(std::move(actions));
}

ActionSet ActionSet::basis(std::size_t k) {
  return from_columns(Matrix::Identity(static_cast<Eigen::Index>(k),
                                       static_cast<Eigen::Index>(k)));
}

std::size_t ActionSet::affine_dim() const {
  if (!affine_dim_) affine_dim_ = affine_dimension(*this);
  return *affine_dim_;
}

namespace {

Matrix difference_matrix(const ActionSet& actions) {
  const auto d = static_cast<Eigen::Index>(actions.ambient_dim());
  const auto n = static_cast<Eigen::Index>(actions.size());
  Matrix diffs(d, std::max<Eigen::Index>(n - 1, 0));
  for (Eigen::Index i = 1; i < n; ++i)
    diffs.col(i - 1) = actions[static_cast<std::size_t>(i)] - actions[0];
  return diffs;
}

}  // namespace

std::size_t affine_dimension(const ActionSet& actions, double tol) {
  if (actions.size() <= 1) return 0;
  const Matrix diffs = difference_matrix(actions);
  Eigen::JacobiSVD<Matrix> svd(diffs);
  const Vector& s = svd.singularValues();
  const double cutoff = tol * std::max(s.size() > 0 ? s[0] : 0.0, 1.0);
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > cutoff) ++rank;
  return rank;
}

Matrix affine_basis(const ActionSet& actions, double tol) {
  const auto d = static_cast<Eigen::Index>(actions.ambient_dim());
  if (actions.size() <= 1) return Matrix(d, 0);
  const Matrix diffs = difference_matrix(actions);
  Eigen::JacobiSVD<Matrix> svd(diffs, Eigen::ComputeThinU);
  const Vector& s = svd.singularValues();
  const double cutoff = tol * std::max(s.size() > 0 ? s[0] : 0.0, 1.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > cutoff) ++rank;
  return svd.matrixU().leftCols(rank);
}

SparseDistribution::SparseDistribution(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw ContractViolation("SparseDistribution: empty support");
  std::unordered_set<std::size_t> seen;
  double total = 0.0;
  for (const auto& [index, prob] : atoms_) {
    if (!(prob > 0.0)) throw ContractViolation("SparseDistribution: non-positive probability");
    if (!seen.insert(index).second)
      throw ContractViolation("SparseDistribution: duplicate index");
    total += prob;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw ContractViolation("SparseDistribution: probabilities do not sum to one");
}

SparseDistribution SparseDistribution::point_mass(std::size_t index) {
  return SparseDistribution({{index, 1.0}});
}

SparseDistribution SparseDistribution::uniform(std::size_t n) {
  std::vector<Atom> atoms;
  atoms.reserve(n);
  for (std::size_t i = 0; i < n; ++i) atoms.emplace_back(i, 1.0 / static_cast<double>(n));
  return SparseDistribution(std::move(atoms));
}

SparseDistribution SparseDistribution::from_dense(const Vector& probs) {
  std::vector<Atom> atoms;
  for (Eigen::Index i = 0; i < probs.size(); ++i)
    if (probs[i] > 0.0) atoms.emplace_back(static_cast<std::size_t>(i), probs[i]);
  return SparseDistribution(std::move(atoms));
}

double SparseDistribution::probability(std::size_t index) const {
  for (const auto& [i, prob] : atoms_)
    if (i == index) return prob;
  return 0.0;
}

Vector SparseDistribution::to_dense(std::size_t n) const {
  Vector out = Vector::Zero(static_cast<Eigen::Index>(n));
  for (const auto& [i, prob] : atoms_) {
    if (i >= n) throw ContractViolation("SparseDistribution: index out of range");
    out[static_cast<Eigen::Index>(i)] = prob;
  }
  return out;
}

std::size_t SparseDistribution::sample(RngStream& rng) const {
  const double u = rng.uniform();
  double cumulative = 0.0;
  for (const auto& [index, prob] : atoms_) {
    cumulative += prob;
    if (u < cumulative) return index;
  }
  // Rounding left u above the final partial sum.
  return atoms_.back().first;
}

Moments moments(const SparseDistribution& p, const ActionSet& actions) {
  const auto d = static_cast<Eigen::Index>(actions.ambient_dim());
  Moments m{Vector::Zero(d), Matrix::Zero(d, d)};
  for (const auto& [index, prob] : p.support()) {
    if (index >= actions.size()) throw ContractViolation("moments: support index out of range");
    const Vector& a = actions[index];
    m.mean_action += prob * a;
    m.second_moment.noalias() += prob * a * a.transpose();
  }
  return m;
}

std::size_t argmin_index(const Vector& v) {
  std::size_t best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (v[i] < v[static_cast<Eigen::Index>(best)]) best = static_cast<std::size_t>(i);
  return best;
}

}  // namespace adaptcb
