#include "adaptcb/aggregation.hpp"

#include <algorithm>
#include <cmath>

namespace adaptcb {

namespace {

constexpr std::uint64_t kMasterTag = 0x6d617374;
constexpr std::uint64_t kBaseTag = 0x62617365;
constexpr std::uint64_t kEpisodeTag = 0x65706973;

}  // namespace

std::size_t corral_base_count(std::size_t horizon) {
  const double m = std::floor(std::log(static_cast<double>(std::max<std::size_t>(horizon, 1))));
  return std::max<std::size_t>(1, static_cast<std::size_t>(m));
}

std::vector<double> corral_eps_grid(std::size_t bases) {
  std::vector<double> grid(bases);
  for (std::size_t m = 0; m < bases; ++m) grid[m] = std::exp(-static_cast<double>(m + 1));
  return grid;
}

double corral_hedge(double dim, double horizon, double reg_sq) {
  return 1.5 * std::sqrt(dim * horizon * reg_sq);
}

Corral::Corral(const CorralParams& params, const OracleFactory& make_oracle, std::uint64_t seed)
    : params_(params),
      eps_grid_(corral_eps_grid(params.bases.value_or(corral_base_count(params.horizon)))),
      master_(eps_grid_.size(),
              params.master_rate.value_or(tsallis_default_rate(params.horizon)), params.alpha,
              params.hedge.value_or(corral_hedge(params.dim, static_cast<double>(params.horizon),
                                                 params.reg_sq))),
      master_rng_(RngStream::derive(seed, kMasterTag)) {
  if (params.horizon < 1) throw ConfigError("Corral: horizon must be positive");
  for (std::size_t m = 0; m < eps_grid_.size(); ++m) {
    BasePlusParams bp;
    bp.eps_guess = eps_grid_[m];
    bp.dim = params.dim;
    bp.horizon = static_cast<double>(params.horizon);
    bp.reg_sq = params.reg_sq;
    bp.eta = params.eta;
    bases_.push_back(std::make_unique<BasePlus>(make_oracle(), bp,
                                                RngStream::derive(seed, kBaseTag, m).next_u64()));
  }
}

Decision Corral::act(const Vector& context, const ActionSet& actions) {
  const MasterDraw draw = master_.sample(master_rng_);
  Decision out = bases_[draw.arm]->act(context, actions, draw.prob, draw.rho);
  if (out.action >= actions.size()) throw ContractViolation("Corral: base played outside A_t");
  out.base = static_cast<int>(draw.arm);
  active_ = draw.arm;
  return out;
}

void Corral::observe(double loss) {
  if (!active_) throw ContractViolation("Corral: observe without act");
  bases_[*active_]->observe(loss);
  last_event_ = master_.update(loss + 1.0);
  active_.reset();
}

std::size_t Corral::cap_hits() const {
  std::size_t total = 0;
  for (const auto& b : bases_) total += b->cap_hits();
  return total;
}

DimensionAdaptive::DimensionAdaptive(std::size_t horizon, double max_dim,
                                     std::function<CorralParams(double)> make_params,
                                     OracleFactory make_oracle, std::uint64_t seed)
    : horizon_(horizon), max_dim_(max_dim), make_params_(std::move(make_params)),
      make_oracle_(std::move(make_oracle)), seed_(seed) {
  if (horizon == 0) throw ConfigError("DimensionAdaptive: horizon must be positive");
  if (!(max_dim >= 1.0)) throw ConfigError("DimensionAdaptive: dimension must be >= 1");
  budgets_.push_back(static_cast<double>(horizon));
  start_episode(1);
}

void DimensionAdaptive::start_episode(std::size_t round) {
  const double budget = budgets_.back();
  d_guess_ = std::clamp(budget / static_cast<double>(horizon_), 1.0, max_dim_);
  const std::uint64_t episode_seed =
      RngStream::derive(seed_, kEpisodeTag, restarts_.size()).next_u64();
  inner_ = std::make_unique<Corral>(make_params_(d_guess_), make_oracle_, episode_seed);
  restarts_.push_back(round);
  episode_dims_.push_back(0.0);
}

Decision DimensionAdaptive::act(const Vector& context, const ActionSet& actions) {
  ++round_;
  const double dim = static_cast<double>(actions.affine_dim());
  // Restart before play: the overflowing round belongs to the new episode.
  if (episode_dims_.back() + dim > budgets_.back()) {
    budgets_.push_back(2.0 * budgets_.back());
    start_episode(round_);
  }
  episode_dims_.back() += dim;
  return inner_->act(context, actions);
}

void DimensionAdaptive::observe(double loss) { inner_->observe(loss); }

}  // namespace adaptcb
