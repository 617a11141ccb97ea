#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace adaptcb {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Raised when a caller breaks an operation's precondition or an internal
/// invariant is found violated at runtime.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Raised for malformed configuration (dimension mismatch, bad enum, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kUnitBallSlack = 1e-9;
inline constexpr double kAffineRankTol = 1e-8;

/// Seeded, single-owner random stream.
///
/// Draws are derived by hand from the raw 64-bit engine output so that a seed
/// reproduces the same sequence on every standard library implementation.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0);

  /// Stream keyed by (seed, tag, index); used to derive independent per-round
  /// and per-component streams without sharing state.
  static RngStream derive(std::uint64_t seed, std::uint64_t tag,
                          std::uint64_t index = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  bool bernoulli(double prob) { return uniform() < prob; }
  std::size_t uniform_index(std::size_t n);
  /// Uniform direction on the unit sphere in R^dim.
  Vector unit_vector(std::size_t dim);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

/// Finite action set for one round. Actions live in the unit ball.
class ActionSet {
 public:
  ActionSet() = default;
  explicit ActionSet(std::vector<Vector> actions);
  /// Columns of `m` are the actions.
  static ActionSet from_columns(const Matrix& m);
  /// The standard basis {e_1, ..., e_k}.
  static ActionSet basis(std::size_t k);

  std::size_t size() const { return actions_.size(); }
  std::size_t ambient_dim() const { return dim_; }
  const Vector& operator[](std::size_t i) const { return actions_[i]; }
  const std::vector<Vector>& actions() const { return actions_; }
  /// Affine dimension with the default relative tolerance; cached.
  std::size_t affine_dim() const;

 private:
  std::vector<Vector> actions_;
  std::size_t dim_ = 0;
  mutable std::optional<std::size_t> affine_dim_;
};

/// Rank of {a_i - a_0}, counting singular values above tol * max(sigma_max, 1).
std::size_t affine_dimension(const ActionSet& actions, double tol = kAffineRankTol);

/// Orthonormal basis (columns) of span{a_i - a_0}; d x k with k = affine dim.
Matrix affine_basis(const ActionSet& actions, double tol = kAffineRankTol);

/// Countably supported distribution over indices of an ActionSet.
class SparseDistribution {
 public:
  using Atom = std::pair<std::size_t, double>;

  SparseDistribution() = default;
  /// Validates: probabilities > 0, sum to 1 within 1e-9, no duplicates.
  explicit SparseDistribution(std::vector<Atom> atoms);
  static SparseDistribution point_mass(std::size_t index);
  static SparseDistribution uniform(std::size_t n);
  /// Dense probability vector; zero entries are dropped from the support.
  static SparseDistribution from_dense(const Vector& probs);

  const std::vector<Atom>& support() const { return atoms_; }
  std::size_t support_size() const { return atoms_.size(); }
  double probability(std::size_t index) const;
  Vector to_dense(std::size_t n) const;

  /// Inverse CDF over the support in stored order; one uniform draw.
  std::size_t sample(RngStream& rng) const;

 private:
  std::vector<Atom> atoms_;
};

struct Moments {
  Vector mean_action;     // E[a]
  Matrix second_moment;   // E[a a^T]

  Matrix covariance() const {
    return second_moment - mean_action * mean_action.transpose();
  }
};

Moments moments(const SparseDistribution& p, const ActionSet& actions);

/// Index of the minimum entry; ties go to the lowest index.
std::size_t argmin_index(const Vector& v);

}  // namespace adaptcb
