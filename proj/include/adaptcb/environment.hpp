#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "adaptcb/core.hpp"

namespace adaptcb {

enum class EnvKind { finite_arm, linear_bandit, linear_contextual };
enum class MisspecShape { none, sinusoidal, corrupted_rounds };
enum class ActionGen { fixed_basis, resample_sphere, low_dim_subspace };
enum class NoiseKind { bernoulli_pm1, uniform_band };

struct EnvSpec {
  EnvKind kind = EnvKind::linear_bandit;
  std::size_t dim = 5;            // action dimension (K for finite_arm)
  std::size_t feature_dim = 0;    // context dimension; 0 = no context
  std::size_t horizon = 1000;
  double eps = 0.0;               // misspecification amplitude
  MisspecShape shape = MisspecShape::sinusoidal;
  std::size_t corrupted = 0;      // C for corrupted_rounds
  ActionGen actions = ActionGen::resample_sphere;
  std::size_t action_count = 20;  // actions per round (resample_sphere, low_dim_subspace)
  std::vector<std::size_t> subspace_schedule{2};  // cycled, one entry per round
  NoiseKind noise = NoiseKind::bernoulli_pm1;
  double margin = 0.1;            // delta: |mean| <= 1 - delta
  double frequency = 7.0;

  /// Throws ConfigError on inconsistent fields.
  void validate() const;
};

std::string to_string(EnvKind v);
std::string to_string(MisspecShape v);
std::string to_string(ActionGen v);
std::string to_string(NoiseKind v);
EnvKind parse_env_kind(const std::string& s);
MisspecShape parse_misspec_shape(const std::string& s);
ActionGen parse_action_gen(const std::string& s);
NoiseKind parse_noise_kind(const std::string& s);

struct Round {
  std::size_t t = 0;
  Vector context;
  ActionSet actions;
};

struct RoundTruth {
  double best_mean_loss = 0.0;
  double played_mean_loss = 0.0;
  double misspec_sup_sq = 0.0;
  std::size_t best_action = 0;
};

/// Planted linear model plus bounded misspecification:
///   mu(a, x) = <a, f*(x)> + eps g(a, x),  g = sin(freq <v, a> + <u, x>),
/// with |f*(x)| <= 1 - eps - delta so no clipping is ever needed.
/// Everything is a pure function of (spec, seed, t).
class Environment {
 public:
  Environment(EnvSpec spec, std::uint64_t seed);

  const EnvSpec& spec() const { return spec_; }
  std::uint64_t seed() const { return seed_; }

  Round emit(std::size_t t) const;
  /// f*(x).
  Vector planted(const Vector& context) const;
  /// eps g(a, x) on round t (zero on clean rounds).
  double misspec(const Vector& context, const Vector& action, std::size_t t) const;
  double mean_loss(const Vector& context, const Vector& action, std::size_t t) const;
  /// Realized loss; the noise draw is keyed by (seed, t) only.
  double loss(const Round& round, std::size_t action) const;
  RoundTruth truth(const Round& round, std::size_t action) const;
  bool corrupted_round(std::size_t t) const;

  const Matrix& planted_matrix() const { return theta_star_; }

 private:
  EnvSpec spec_;
  std::uint64_t seed_;
  Matrix theta_star_;  // d x max(feature_dim, 1)
  Vector v_;
  Vector u_;
};

}  // namespace adaptcb
