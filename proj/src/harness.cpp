#include "adaptcb/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace adaptcb {

using nlohmann::json;

namespace {

constexpr std::uint64_t kLearnerTag = 0x6c726e72;

class TsallisMab final : public Learner {
 public:
  TsallisMab(std::size_t arms, double eta, double hedge, std::uint64_t seed)
      : master_(arms, eta, 0.5, hedge), rng_(RngStream::derive(seed, kLearnerTag)) {}

  Decision act(const Vector& /*context*/, const ActionSet& actions) override {
    if (actions.size() != master_.arms())
      throw ContractViolation("tsallis_mab: action count differs from arm count");
    const MasterDraw draw = master_.sample(rng_);
    Decision out;
    out.action = draw.arm;
    out.q = draw.prob;
    out.rho = draw.rho;
    return out;
  }
  void observe(double loss) override { master_.update(loss + 1.0); }

 private:
  HedgedTsallisInf master_;
  RngStream rng_;
};

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return j.at(key).get<T>();
}

EnvSpec parse_env(const json& j) {
  EnvSpec e;
  if (!j.is_object()) throw ConfigError("config: env must be an object");
  e.kind = parse_env_kind(get_or<std::string>(j, "kind", to_string(e.kind)));
  e.dim = get_or<std::size_t>(j, "d", e.dim);
  e.feature_dim = get_or<std::size_t>(j, "feature_dim", e.feature_dim);
  e.eps = get_or<double>(j, "eps", e.eps);
  e.shape = parse_misspec_shape(get_or<std::string>(j, "misspec_shape", to_string(e.shape)));
  e.corrupted = get_or<std::size_t>(j, "corrupted_rounds", e.corrupted);
  if (e.kind == EnvKind::finite_arm) {
    e.actions = ActionGen::fixed_basis;
    e.dim = get_or<std::size_t>(j, "K", e.dim);
  }
  e.actions = parse_action_gen(get_or<std::string>(j, "action_gen", to_string(e.actions)));
  e.action_count = get_or<std::size_t>(j, "action_count", e.action_count);
  e.subspace_schedule = get_or<std::vector<std::size_t>>(j, "subspace_schedule",
                                                         e.subspace_schedule);
  e.noise = parse_noise_kind(get_or<std::string>(j, "noise", to_string(e.noise)));
  e.margin = get_or<double>(j, "margin", e.margin);
  e.frequency = get_or<double>(j, "frequency", e.frequency);
  return e;
}

json env_to_json(const EnvSpec& e) {
  return json{{"kind", to_string(e.kind)},
              {"d", e.dim},
              {"feature_dim", e.feature_dim},
              {"eps", e.eps},
              {"misspec_shape", to_string(e.shape)},
              {"corrupted_rounds", e.corrupted},
              {"action_gen", to_string(e.actions)},
              {"action_count", e.action_count},
              {"subspace_schedule", e.subspace_schedule},
              {"noise", to_string(e.noise)},
              {"margin", e.margin},
              {"frequency", e.frequency}};
}

json config_json(const ExperimentConfig& c) {
  const auto& p = c.params;
  json params{{"selector", p.selector == FiniteSelector::igw ? "igw" : "log_barrier"},
              {"eps_known", p.eps_known},
              {"gamma_scale", p.gamma_scale},
              {"eta", p.eta},
              {"reg_sq_scale", p.reg_sq_scale},
              {"ons_ridge", p.ons.ridge},
              {"ons_step_scale", p.ons.step_scale},
              {"hedge", p.hedge}};
  params["gamma"] = p.gamma ? json(*p.gamma) : json(nullptr);
  params["dim_tuning"] = p.dim_tuning ? json(*p.dim_tuning) : json(nullptr);
  params["master_rate"] = p.master_rate ? json(*p.master_rate) : json(nullptr);
  return json{{"algorithm", to_string(c.algorithm)},
              {"T", c.horizon},
              {"seeds", c.seeds},
              {"env", env_to_json(c.env)},
              {"params", params},
              {"per_round", c.per_round}};
}

std::vector<std::size_t> make_checkpoints(std::size_t horizon) {
  std::vector<std::size_t> out;
  const double lo = std::log(static_cast<double>(std::max<std::size_t>(1, horizon / 100)));
  const double hi = std::log(static_cast<double>(horizon));
  constexpr int kPoints = 24;
  for (int i = 0; i <= kPoints; ++i) {
    const auto t = static_cast<std::size_t>(std::llround(std::exp(lo + (hi - lo) * i / kPoints)));
    if (t >= 1 && (out.empty() || t > out.back())) out.push_back(std::min(t, horizon));
  }
  if (out.back() != horizon) out.push_back(horizon);
  return out;
}

double oracle_dim(const EnvSpec& env) {
  return static_cast<double>(env.dim * std::max<std::size_t>(env.feature_dim, 1));
}

}  // namespace

std::string to_string(AlgorithmKind v) {
  switch (v) {
    case AlgorithmKind::squarecb: return "squarecb";
    case AlgorithmKind::squarecb_lin: return "squarecb_lin";
    case AlgorithmKind::corral: return "corral";
    case AlgorithmKind::corral_dim_adaptive: return "corral_dim_adaptive";
    case AlgorithmKind::tsallis_mab: return "tsallis_mab";
  }
  return "?";
}

AlgorithmKind parse_algorithm(const std::string& s) {
  for (auto k : {AlgorithmKind::squarecb, AlgorithmKind::squarecb_lin, AlgorithmKind::corral,
                 AlgorithmKind::corral_dim_adaptive, AlgorithmKind::tsallis_mab})
    if (to_string(k) == s) return k;
  throw ConfigError("unknown algorithm: " + s);
}

void ExperimentConfig::validate() const {
  if (seeds.empty()) throw ConfigError("config: seeds must be non-empty");
  if (horizon < 10) throw ConfigError("config: T must be at least 10");
  EnvSpec e = env;
  e.horizon = horizon;
  e.validate();
  if (params.gamma && !(*params.gamma > 0.0)) throw ConfigError("config: gamma must be positive");
  if (!(params.eta > 0.0)) throw ConfigError("config: eta must be positive");
  if (!(params.gamma_scale > 0.0) || !(params.reg_sq_scale > 0.0))
    throw ConfigError("config: scales must be positive");
  if (params.eps_known < 0.0) throw ConfigError("config: eps_known must be nonnegative");
  const bool finite = env.kind == EnvKind::finite_arm;
  if ((algorithm == AlgorithmKind::squarecb || algorithm == AlgorithmKind::tsallis_mab) && !finite)
    throw ConfigError("config: " + to_string(algorithm) + " needs a finite_arm env");
  if (algorithm == AlgorithmKind::tsallis_mab && env.feature_dim != 0)
    throw ConfigError("config: tsallis_mab takes no context");
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  ExperimentConfig c;
  try {
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    c.algorithm = parse_algorithm(get_or<std::string>(j, "algorithm", to_string(c.algorithm)));
    c.horizon = get_or<std::size_t>(j, "T", c.horizon);
    c.seeds = get_or<std::vector<std::uint64_t>>(j, "seeds", c.seeds);
    if (j.contains("env")) c.env = parse_env(j.at("env"));
    c.per_round = get_or<bool>(j, "per_round", c.per_round);
    if (j.contains("output_dir") && !j.at("output_dir").is_null())
      c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("params")) {
      const json& p = j.at("params");
      auto& a = c.params;
      if (p.contains("gamma") && !p.at("gamma").is_null()) a.gamma = p.at("gamma").get<double>();
      const auto sel = get_or<std::string>(p, "selector", "igw");
      if (sel == "igw") a.selector = FiniteSelector::igw;
      else if (sel == "log_barrier") a.selector = FiniteSelector::log_barrier;
      else throw ConfigError("config: unknown selector " + sel);
      a.eps_known = get_or<double>(p, "eps_known", a.eps_known);
      a.gamma_scale = get_or<double>(p, "gamma_scale", a.gamma_scale);
      a.eta = get_or<double>(p, "eta", a.eta);
      a.reg_sq_scale = get_or<double>(p, "reg_sq_scale", a.reg_sq_scale);
      a.ons.ridge = get_or<double>(p, "ons_ridge", a.ons.ridge);
      a.ons.step_scale = get_or<double>(p, "ons_step_scale", a.ons.step_scale);
      if (p.contains("dim_tuning") && !p.at("dim_tuning").is_null())
        a.dim_tuning = p.at("dim_tuning").get<double>();
      if (p.contains("master_rate") && !p.at("master_rate").is_null())
        a.master_rate = p.at("master_rate").get<double>();
      a.hedge = get_or<double>(p, "hedge", a.hedge);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.env.horizon = c.horizon;
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_json(const ExperimentConfig& config) { return config_json(config).dump(2); }

const char* round_csv_header() {
  return "seed,t,base,q,rho,action,loss,mean_loss,best_mean_loss,inst_regret,cum_regret,"
         "cum_misspec_sq,solver_iterations,dim";
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string round_csv_line(const RoundRow& r) {
  std::string s;
  s.reserve(256);
  s += std::to_string(r.seed) + ',' + std::to_string(r.t) + ',' + std::to_string(r.base) + ',';
  s += format_double(r.q) + ',' + format_double(r.rho) + ',' + std::to_string(r.action) + ',';
  s += format_double(r.loss) + ',' + format_double(r.mean_loss) + ',' +
       format_double(r.best_mean_loss) + ',';
  s += format_double(r.inst_regret) + ',' + format_double(r.cum_regret) + ',' +
       format_double(r.cum_misspec_sq) + ',';
  s += std::to_string(r.solver_iterations) + ',' + std::to_string(r.dim);
  return s;
}

std::unique_ptr<Learner> make_learner(const ExperimentConfig& config, std::uint64_t seed) {
  const auto& env = config.env;
  const auto& p = config.params;
  const double T = static_cast<double>(config.horizon);
  const double d = static_cast<double>(env.dim);
  const double reg_sq = default_reg_sq(oracle_dim(env), T, p.reg_sq_scale);
  const std::uint64_t learner_seed = RngStream::derive(seed, kLearnerTag).next_u64();
  OracleFactory factory = [env, ons = p.ons] {
    return make_linear_oracle(env.dim, env.feature_dim, ons);
  };
  switch (config.algorithm) {
    case AlgorithmKind::squarecb: {
      const double gamma = p.gamma.value_or(tuned_gamma(d, T, reg_sq, p.eps_known, p.gamma_scale));
      return std::make_unique<SquareCb>(factory(), gamma, p.selector, learner_seed);
    }
    case AlgorithmKind::squarecb_lin: {
      const double gamma = p.gamma.value_or(tuned_gamma(d, T, reg_sq, p.eps_known, p.gamma_scale));
      return std::make_unique<SquareCbLin>(factory(), gamma, p.eta, learner_seed);
    }
    case AlgorithmKind::corral: {
      CorralParams cp;
      cp.horizon = config.horizon;
      cp.dim = p.dim_tuning.value_or(d);
      cp.reg_sq = reg_sq;
      cp.eta = p.eta;
      return std::make_unique<Corral>(cp, factory, learner_seed);
    }
    case AlgorithmKind::corral_dim_adaptive: {
      auto make_params = [horizon = config.horizon, reg_sq, eta = p.eta](double d_guess) {
        CorralParams cp;
        cp.horizon = horizon;
        cp.dim = d_guess;
        cp.reg_sq = reg_sq;
        cp.eta = eta;
        return cp;
      };
      return std::make_unique<DimensionAdaptive>(config.horizon, p.dim_tuning.value_or(d),
                                                 make_params, factory, learner_seed);
    }
    case AlgorithmKind::tsallis_mab:
      return std::make_unique<TsallisMab>(env.dim,
                                          p.master_rate.value_or(tsallis_default_rate(config.horizon)),
                                          p.hedge, learner_seed);
  }
  throw ConfigError("unknown algorithm");
}

SeedResult run_seed(const ExperimentConfig& config, std::uint64_t seed,
                    const std::function<void(const RoundRow&)>& sink) {
  EnvSpec spec = config.env;
  spec.horizon = config.horizon;
  const Environment env(spec, seed);
  auto learner = make_learner(config, seed);
  const auto checkpoints = make_checkpoints(config.horizon);
  auto next_checkpoint = checkpoints.begin();

  SeedResult out;
  out.seed = seed;
  RoundRow row;
  row.seed = seed;
  double dim_sum = 0.0;
  for (std::size_t t = 1; t <= config.horizon; ++t) {
    const Round round = env.emit(t);
    const Decision dec = learner->act(round.context, round.actions);
    if (dec.action >= round.actions.size())
      throw ContractViolation("harness: learner chose an action outside A_t");
    const RoundTruth truth = env.truth(round, dec.action);
    const double loss = env.loss(round, dec.action);
    learner->observe(loss);

    row.t = t;
    row.base = dec.base;
    row.q = dec.q;
    row.rho = dec.rho;
    row.action = dec.action;
    row.loss = loss;
    row.mean_loss = truth.played_mean_loss;
    row.best_mean_loss = truth.best_mean_loss;
    row.inst_regret = truth.played_mean_loss - truth.best_mean_loss;
    row.cum_regret += row.inst_regret;
    row.cum_misspec_sq += truth.misspec_sup_sq;
    row.solver_iterations = dec.solver_iterations;
    row.dim = round.actions.affine_dim();
    dim_sum += static_cast<double>(row.dim);
    if (dec.solver_called) ++out.solver_calls;
    if (dec.cap_hit) ++out.cap_hits;
    if (sink) sink(row);
    if (next_checkpoint != checkpoints.end() && *next_checkpoint == t) {
      out.checkpoint_regret.push_back(row.cum_regret);
      ++next_checkpoint;
    }
  }
  const double T = static_cast<double>(config.horizon);
  out.final_regret = row.cum_regret;
  out.eps_upper = std::sqrt(row.cum_misspec_sq / T);
  out.d_avg = dim_sum / T;
  if (auto* da = dynamic_cast<DimensionAdaptive*>(learner.get())) {
    out.episodes = da->episodes();
    for (std::size_t i = 0; i < da->episodes(); ++i)
      if (da->episode_dims()[i] > da->budgets()[i]) out.budgets_respected = false;
  }
  return out;
}

RunSummary run_experiment(const ExperimentConfig& config, std::ostream* csv) {
  config.validate();
  RunSummary s;
  s.config = config;
  s.checkpoints = make_checkpoints(config.horizon);
  if (csv) *csv << round_csv_header() << '\n';
  std::function<void(const RoundRow&)> sink;
  if (csv) sink = [csv](const RoundRow& r) { *csv << round_csv_line(r) << '\n'; };
  for (auto seed : config.seeds) s.seeds.push_back(run_seed(config, seed, sink));

  const double n = static_cast<double>(s.seeds.size());
  std::vector<double> mean_curve(s.checkpoints.size(), 0.0);
  double sum = 0.0, sum_sq = 0.0, calls = 0.0, caps = 0.0;
  for (const auto& r : s.seeds) {
    sum += r.final_regret;
    sum_sq += r.final_regret * r.final_regret;
    s.eps_upper += r.eps_upper / n;
    s.d_avg += r.d_avg / n;
    calls += static_cast<double>(r.solver_calls);
    caps += static_cast<double>(r.cap_hits);
    for (std::size_t i = 0; i < mean_curve.size(); ++i) mean_curve[i] += r.checkpoint_regret[i] / n;
  }
  s.mean_regret = sum / n;
  const double var = n > 1 ? std::max(0.0, (sum_sq - n * s.mean_regret * s.mean_regret) / (n - 1)) : 0.0;
  s.stderr_regret = std::sqrt(var / n);
  s.cap_hit_rate = calls > 0 ? caps / calls : 0.0;

  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < s.checkpoints.size(); ++i) {
    if (s.checkpoints[i] * 10 < config.horizon || mean_curve[i] <= 0.0) continue;
    xs.push_back(static_cast<double>(s.checkpoints[i]));
    ys.push_back(mean_curve[i]);
  }
  s.slope = xs.size() >= 2 ? loglog_slope(xs, ys) : 0.0;

  if (config.algorithm == AlgorithmKind::corral ||
      config.algorithm == AlgorithmKind::corral_dim_adaptive) {
    s.bases = corral_base_count(config.horizon);
    s.eps_grid = corral_eps_grid(s.bases);
  }
  return s;
}

std::string summary_to_json(const RunSummary& s) {
  json seeds = json::array();
  for (const auto& r : s.seeds)
    seeds.push_back(json{{"seed", r.seed},
                         {"final_regret", r.final_regret},
                         {"eps_upper", r.eps_upper},
                         {"d_avg", r.d_avg},
                         {"solver_calls", r.solver_calls},
                         {"cap_hits", r.cap_hits},
                         {"episodes", r.episodes},
                         {"budgets_respected", r.budgets_respected}});
  json j{{"config", config_json(s.config)},
         {"mean_regret", s.mean_regret},
         {"stderr_regret", s.stderr_regret},
         {"loglog_slope", s.slope},
         {"eps_upper", s.eps_upper},
         {"d_avg", s.d_avg},
         {"cap_hit_rate", s.cap_hit_rate},
         {"seeds", seeds}};
  if (s.bases > 0) {
    j["M"] = s.bases;
    j["eps_grid"] = s.eps_grid;
  }
  return j.dump(2);
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("fit: need at least two points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw ConfigError("fit: degenerate abscissae");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= 0.0 || y[i] <= 0.0) throw ConfigError("fit: log of a nonpositive value");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return fit_line(lx, ly).slope;
}

SweepAxis parse_sweep_axis(const std::string& s) {
  if (s == "T") return SweepAxis::horizon;
  if (s == "eps") return SweepAxis::eps;
  if (s == "d") return SweepAxis::dim;
  throw ConfigError("unknown sweep axis: " + s);
}

ExperimentConfig with_axis_value(const ExperimentConfig& config, SweepAxis axis, double value) {
  ExperimentConfig c = config;
  auto as_count = [](double v) {
    if (!(v >= 1.0) || v != std::floor(v)) throw ConfigError("sweep: expected a positive integer");
    return static_cast<std::size_t>(v);
  };
  switch (axis) {
    case SweepAxis::horizon:
      c.horizon = as_count(value);
      c.env.horizon = c.horizon;
      break;
    case SweepAxis::eps:
      c.env.eps = value;
      break;
    case SweepAxis::dim:
      c.env.dim = as_count(value);
      break;
  }
  c.validate();
  return c;
}

SweepResult run_sweep(const ExperimentConfig& config, SweepAxis axis,
                      const std::vector<double>& values) {
  if (values.empty()) throw ConfigError("sweep: empty values list");
  if (!std::is_sorted(values.begin(), values.end()) ||
      std::adjacent_find(values.begin(), values.end()) != values.end())
    throw ConfigError("sweep: values must be strictly ascending");
  SweepResult out{axis, values, {}, 0.0, {}};
  for (double v : values) out.runs.push_back(run_experiment(with_axis_value(config, axis, v)));
  std::vector<double> xs, ys, lx, ly;
  for (std::size_t i = 0; i < values.size(); ++i) {
    xs.push_back(values[i]);
    ys.push_back(out.runs[i].mean_regret);
    if (values[i] > 0.0 && out.runs[i].mean_regret > 0.0) {
      lx.push_back(values[i]);
      ly.push_back(out.runs[i].mean_regret);
    }
  }
  if (xs.size() >= 2) out.linear = fit_line(xs, ys);
  if (lx.size() >= 2) out.loglog_slope = loglog_slope(lx, ly);
  return out;
}

std::string sweep_to_json(const SweepResult& sweep) {
  static const char* names[] = {"T", "eps", "d"};
  json rows = json::array();
  for (std::size_t i = 0; i < sweep.values.size(); ++i) {
    const auto& r = sweep.runs[i];
    rows.push_back(json{{"value", sweep.values[i]},
                        {"mean_regret", r.mean_regret},
                        {"stderr_regret", r.stderr_regret},
                        {"eps_upper", r.eps_upper},
                        {"d_avg", r.d_avg},
                        {"loglog_slope", r.slope}});
  }
  json j{{"axis", names[static_cast<int>(sweep.axis)]},
         {"rows", rows},
         {"loglog_slope", sweep.loglog_slope},
         {"linear_fit",
          {{"slope", sweep.linear.slope},
           {"intercept", sweep.linear.intercept},
           {"r2", sweep.linear.r2}}}};
  if (!sweep.runs.empty()) j["config"] = config_json(sweep.runs.front().config);
  return j.dump(2);
}

std::string default_output_dir() {
  if (const char* dir = std::getenv("ADAPTCB_OUTPUT_DIR"); dir && *dir) return dir;
  return "adaptcb_out";
}

}  // namespace adaptcb
