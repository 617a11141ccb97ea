#include "adaptcb/environment.hpp"

#include <algorithm>
#include <cmath>

namespace adaptcb {

namespace {

constexpr std::uint64_t kPlantedTag = 0x706c616e;
constexpr std::uint64_t kRoundTag = 0x726f756e;
constexpr std::uint64_t kNoiseTag = 0x6e6f6973;

template <typename E>
E parse_enum(const std::string& s, std::initializer_list<std::pair<const char*, E>> table,
             const char* what) {
  for (const auto& [name, value] : table)
    if (s == name) return value;
  throw ConfigError(std::string("unknown ") + what + ": " + s);
}

Matrix random_orthonormal(std::size_t rows, std::size_t cols, RngStream& rng) {
  Matrix g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index j = 0; j < g.cols(); ++j)
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ() * Matrix::Identity(g.rows(), g.cols());
}

}  // namespace

std::string to_string(EnvKind v) {
  switch (v) {
    case EnvKind::finite_arm: return "finite_arm";
    case EnvKind::linear_bandit: return "linear_bandit";
    case EnvKind::linear_contextual: return "linear_contextual";
  }
  return "?";
}

std::string to_string(MisspecShape v) {
  switch (v) {
    case MisspecShape::none: return "none";
    case MisspecShape::sinusoidal: return "sinusoidal";
    case MisspecShape::corrupted_rounds: return "corrupted_rounds";
  }
  return "?";
}

std::string to_string(ActionGen v) {
  switch (v) {
    case ActionGen::fixed_basis: return "fixed_basis";
    case ActionGen::resample_sphere: return "resample_sphere";
    case ActionGen::low_dim_subspace: return "low_dim_subspace";
  }
  return "?";
}

std::string to_string(NoiseKind v) {
  switch (v) {
    case NoiseKind::bernoulli_pm1: return "bernoulli_pm1";
    case NoiseKind::uniform_band: return "uniform_band";
  }
  return "?";
}

EnvKind parse_env_kind(const std::string& s) {
  return parse_enum<EnvKind>(s,
                             {{"finite_arm", EnvKind::finite_arm},
                              {"linear_bandit", EnvKind::linear_bandit},
                              {"linear_contextual", EnvKind::linear_contextual}},
                             "env kind");
}

MisspecShape parse_misspec_shape(const std::string& s) {
  return parse_enum<MisspecShape>(s,
                                  {{"none", MisspecShape::none},
                                   {"sinusoidal", MisspecShape::sinusoidal},
                                   {"corrupted_rounds", MisspecShape::corrupted_rounds}},
                                  "misspecification shape");
}

ActionGen parse_action_gen(const std::string& s) {
  return parse_enum<ActionGen>(s,
                               {{"fixed_basis", ActionGen::fixed_basis},
                                {"resample_sphere", ActionGen::resample_sphere},
                                {"low_dim_subspace", ActionGen::low_dim_subspace}},
                               "action generator");
}

NoiseKind parse_noise_kind(const std::string& s) {
  return parse_enum<NoiseKind>(s,
                               {{"bernoulli_pm1", NoiseKind::bernoulli_pm1},
                                {"uniform_band", NoiseKind::uniform_band}},
                               "noise kind");
}

void EnvSpec::validate() const {
  if (dim == 0) throw ConfigError("env: dim must be positive");
  if (horizon == 0) throw ConfigError("env: horizon must be positive");
  if (!(eps >= 0.0 && eps <= 1.0)) throw ConfigError("env: eps must lie in [0, 1]");
  if (!(margin >= 0.0 && margin < 1.0)) throw ConfigError("env: margin must lie in [0, 1)");
  if (eps + margin >= 1.0) throw ConfigError("env: eps + margin must be below 1");
  if (kind == EnvKind::finite_arm) {
    if (dim < 2) throw ConfigError("env: finite_arm needs K >= 2");
    if (actions != ActionGen::fixed_basis)
      throw ConfigError("env: finite_arm uses the fixed_basis action generator");
  }
  if (kind == EnvKind::linear_contextual && feature_dim == 0)
    throw ConfigError("env: linear_contextual needs feature_dim > 0");
  if (kind != EnvKind::linear_contextual && kind != EnvKind::finite_arm && feature_dim != 0)
    throw ConfigError("env: linear_bandit takes no context");
  if (actions != ActionGen::fixed_basis && action_count == 0)
    throw ConfigError("env: action_count must be positive");
  if (actions == ActionGen::low_dim_subspace) {
    if (subspace_schedule.empty()) throw ConfigError("env: empty subspace schedule");
    for (auto k : subspace_schedule)
      if (k == 0 || k > dim) throw ConfigError("env: subspace dimension outside [1, dim]");
  }
  if (shape == MisspecShape::corrupted_rounds && corrupted > horizon)
    throw ConfigError("env: more corrupted rounds than the horizon");
}

Environment::Environment(EnvSpec spec, std::uint64_t seed) : spec_(std::move(spec)), seed_(seed) {
  spec_.validate();
  RngStream rng = RngStream::derive(seed, kPlantedTag);
  const auto d = static_cast<Eigen::Index>(spec_.dim);
  const double scale = 1.0 - spec_.eps - spec_.margin;
  if (spec_.feature_dim == 0) {
    theta_star_ = scale * rng.unit_vector(spec_.dim);
  } else {
    // Operator norm scaled so |Theta x| <= scale for unit contexts.
    Matrix g(d, static_cast<Eigen::Index>(spec_.feature_dim));
    for (Eigen::Index j = 0; j < g.cols(); ++j)
      for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = rng.normal();
    Eigen::JacobiSVD<Matrix> svd(g);
    theta_star_ = (scale / svd.singularValues()[0]) * g;
  }
  v_ = rng.unit_vector(spec_.dim);
  u_ = spec_.feature_dim > 0 ? rng.unit_vector(spec_.feature_dim) : Vector();
}

Round Environment::emit(std::size_t t) const {
  RngStream rng = RngStream::derive(seed_, kRoundTag, t);
  Round out;
  out.t = t;
  out.context = spec_.feature_dim > 0 ? rng.unit_vector(spec_.feature_dim) : Vector();
  const std::size_t d = spec_.dim;
  switch (spec_.actions) {
    case ActionGen::fixed_basis:
      out.actions = ActionSet::basis(d);
      break;
    case ActionGen::resample_sphere: {
      std::vector<Vector> acts;
      acts.reserve(spec_.action_count);
      for (std::size_t i = 0; i < spec_.action_count; ++i) acts.push_back(rng.unit_vector(d));
      out.actions = ActionSet(std::move(acts));
      break;
    }
    case ActionGen::low_dim_subspace: {
      const auto& sched = spec_.subspace_schedule;
      const std::size_t k = sched[(t - 1) % sched.size()];
      const Matrix basis = random_orthonormal(d, k, rng);
      std::vector<Vector> acts;
      acts.reserve(spec_.action_count);
      for (std::size_t i = 0; i < spec_.action_count; ++i) {
        Vector a = basis * rng.unit_vector(k);
        const double n = a.norm();
        if (n > 1.0) a /= n;
        acts.push_back(std::move(a));
      }
      out.actions = ActionSet(std::move(acts));
      break;
    }
  }
  return out;
}

Vector Environment::planted(const Vector& context) const {
  if (spec_.feature_dim == 0) return theta_star_.col(0);
  if (context.size() != static_cast<Eigen::Index>(spec_.feature_dim))
    throw ConfigError("env: context dimension mismatch");
  return theta_star_ * context;
}

bool Environment::corrupted_round(std::size_t t) const {
  const auto c = spec_.corrupted;
  const auto T = spec_.horizon;
  // C rounds spread evenly over [1, T].
  return (t * c) / T != ((t - 1) * c) / T;
}

double Environment::misspec(const Vector& context, const Vector& action, std::size_t t) const {
  if (spec_.eps == 0.0 || spec_.shape == MisspecShape::none) return 0.0;
  if (spec_.shape == MisspecShape::corrupted_rounds && !corrupted_round(t)) return 0.0;
  double phase = spec_.frequency * v_.dot(action);
  if (spec_.feature_dim > 0) phase += u_.dot(context);
  return spec_.eps * std::sin(phase);
}

double Environment::mean_loss(const Vector& context, const Vector& action, std::size_t t) const {
  const double mu = action.dot(planted(context)) + misspec(context, action, t);
  const double bound = 1.0 - spec_.margin;
  return std::clamp(mu, -bound, bound);
}

double Environment::loss(const Round& round, std::size_t action) const {
  if (action >= round.actions.size()) throw ContractViolation("env: action not in A_t");
  const double mu = mean_loss(round.context, round.actions[action], round.t);
  RngStream rng = RngStream::derive(seed_, kNoiseTag, round.t);
  const double u = rng.uniform();
  switch (spec_.noise) {
    case NoiseKind::bernoulli_pm1:
      return u < 0.5 * (1.0 + mu) ? 1.0 : -1.0;
    case NoiseKind::uniform_band:
      return mu + spec_.margin * (2.0 * u - 1.0);
  }
  return mu;
}

RoundTruth Environment::truth(const Round& round, std::size_t action) const {
  if (action >= round.actions.size()) throw ContractViolation("env: action not in A_t");
  RoundTruth out;
  out.best_mean_loss = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < round.actions.size(); ++i) {
    const Vector& a = round.actions[i];
    const double mu = mean_loss(round.context, a, round.t);
    if (mu < out.best_mean_loss) {
      out.best_mean_loss = mu;
      out.best_action = i;
    }
    if (i == action) out.played_mean_loss = mu;
    const double gap = misspec(round.context, a, round.t);
    out.misspec_sup_sq = std::max(out.misspec_sup_sq, gap * gap);
  }
  return out;
}

}  // namespace adaptcb
