#include "cappedigw/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <string>

#include "cappedigw/csv.hpp"
#include "cappedigw/rng.hpp"

namespace cigw {

Dataset parse_csv(std::istream& in, bool has_header, const std::string& name) {
  Dataset ds;
  ds.name = name;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (has_header && line_no == 1) continue;

    const auto cells = csv::split(line);
    if (width == 0) {
      width = cells.size();
      if (width < 1) throw DataError("line " + std::to_string(line_no) + ": no columns");
    } else if (cells.size() != width) {
      throw DataError("line " + std::to_string(line_no) + ": expected " + std::to_string(width) +
                      " columns, found " + std::to_string(cells.size()));
    }
    Row row;
    row.features.resize(width - 1);
    for (std::size_t c = 0; c < width; ++c) {
      double v = 0.0;
      if (!csv::parse_double(cells[c], v) || !std::isfinite(v)) {
        throw DataError("line " + std::to_string(line_no) + ", column " + std::to_string(c + 1) +
                        ": not a number: '" + std::string(cells[c]) + "'");
      }
      if (c + 1 == width) {
        row.target = v;
      } else {
        row.features[c] = v;
      }
    }
    ds.rows.push_back(std::move(row));
  }
  return ds;
}

void min_max_scale(Dataset& ds) {
  if (ds.rows.size() < 2) {
    throw DataError("dataset '" + ds.name + "' needs at least two rows to scale");
  }
  const std::size_t dim = ds.dim();
  const auto scale_column = [&](auto&& cell) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (auto& row : ds.rows) {
      lo = std::min(lo, cell(row));
      hi = std::max(hi, cell(row));
    }
    const double range = hi - lo;
    for (auto& row : ds.rows) {
      double& v = cell(row);
      v = range > 0.0 ? (v - lo) / range : 0.0;
    }
  };
  for (std::size_t c = 0; c < dim; ++c) {
    scale_column([c](Row& r) -> double& { return r.features[c]; });
  }
  scale_column([](Row& r) -> double& { return r.target; });
}

Dataset load_and_scale(const std::string& path, std::size_t max_rows, std::uint64_t seed,
                       bool has_header) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset '" + path + "'");
  auto name = path;
  if (const auto slash = name.find_last_of('/'); slash != std::string::npos) {
    name = name.substr(slash + 1);
  }
  Dataset ds = parse_csv(in, has_header, name);
  Rng rng(derive_seed(seed, Stream::kShuffle, 0));
  shuffle(ds.rows, rng);
  if (ds.rows.size() > max_rows) ds.rows.resize(max_rows);
  if (!ds.rows.empty()) min_max_scale(ds);
  return ds;
}

// --- Environments ------------------------------------------------------------

double absolute_loss_benchmark(double y, double tau) {
  const double width = 1.0 / tau;
  const double lo = std::clamp(y - 0.5 * width, 0.0, 1.0 - width);
  const double hi = lo + width;
  return ((y - lo) * (y - lo) + (hi - y) * (hi - y)) / (2.0 * width);
}

SupervisedEnv::SupervisedEnv(Dataset ds) : name_(ds.name), dim_(ds.dim()) {
  contexts_.reserve(ds.size());
  targets_.reserve(ds.size());
  for (auto& row : ds.rows) {
    if (row.features.size() != dim_) throw DataError("ragged dataset '" + name_ + "'");
    contexts_.push_back(Context{std::move(row.features)});
    targets_.push_back(row.target);
  }
}

double SupervisedEnv::benchmark(std::size_t t, double tau) const {
  return absolute_loss_benchmark(targets_[t], tau);
}

double needle_loss(double action, double needle_tau) {
  return 2.0 * action * needle_tau > 1.0 ? 1.0 : 0.0;
}

NeedleEnv::NeedleEnv(double needle_tau, std::size_t horizon)
    : needle_tau_(needle_tau), horizon_(horizon) {
  if (needle_tau < 1.0) throw InvalidConfig("needle tau must be >= 1");
}

double NeedleEnv::benchmark(std::size_t, double tau) const {
  // Density tau fills the zero region of measure 1/(2 needle_tau) first.
  return std::max(0.0, 1.0 - tau / (2.0 * needle_tau_));
}

LinearTruth draw_linear_truth(std::size_t dim, std::uint64_t seed) {
  Rng rng(derive_seed(seed, Stream::kEnvironment, 0));
  LinearTruth truth;
  truth.w.resize(dim);
  double sum = 0.0;
  for (auto& w : truth.w) {
    w = -3.0 + 6.0 * rng.uniform();
    sum += w;
  }
  truth.b = -0.5 * sum;
  return truth;
}

Dataset linear_dataset(const LinearTruth& truth, std::size_t horizon, std::uint64_t seed) {
  Rng rng(derive_seed(seed, Stream::kEnvironment, 1));
  Dataset ds;
  ds.name = "linear";
  ds.rows.resize(horizon);
  for (auto& row : ds.rows) {
    row.features.resize(truth.w.size());
    double logit = truth.b;
    for (std::size_t i = 0; i < truth.w.size(); ++i) {
      row.features[i] = rng.uniform();
      logit += truth.w[i] * row.features[i];
    }
    row.target = 1.0 / (1.0 + std::exp(-logit));
  }
  return ds;
}

std::unique_ptr<Environment> synthetic_env(EnvKind kind, const SyntheticParams& params,
                                           std::size_t horizon, std::uint64_t seed) {
  if (kind == EnvKind::kNeedle) return std::make_unique<NeedleEnv>(params.needle_tau, horizon);
  const auto truth = params.truth ? *params.truth : draw_linear_truth(params.dim, seed);
  return std::make_unique<SupervisedEnv>(linear_dataset(truth, horizon, seed));
}

// --- Online loop -------------------------------------------------------------

void OnlineRunConfig::validate() const {
  policy.validate();
  if (batch_size < 1) throw InvalidConfig("batch_size must be >= 1");
}

double scheduled_gamma(const OnlineRunConfig& cfg, std::size_t t, std::size_t horizon) {
  const auto& p = cfg.policy;
  switch (cfg.gamma_schedule) {
    case GammaSchedule::kFixed:
      return p.gamma;
    case GammaSchedule::kHorizon: {
      PolicyConfig at_horizon = p;
      at_horizon.horizon = static_cast<std::int64_t>(std::max<std::size_t>(horizon, 1));
      return exploration_gamma(static_cast<double>(at_horizon.horizon), p.kappa_inf, p.tau,
                               at_horizon.regsq());
    }
    case GammaSchedule::kGrowing: {
      const double tt = static_cast<double>(std::max<std::size_t>(t, 1));
      return exploration_gamma(tt, p.kappa_inf, p.tau, std::max(std::log(tt), 1.0));
    }
  }
  return p.gamma;
}

OnlineResult run_online(const Environment& env, const OnlineRunConfig& cfg,
                        std::unique_ptr<LossModel> model) {
  cfg.validate();
  const std::size_t horizon = env.size();
  if (!model) {
    model = std::make_unique<OnlineRegressor>(
        init_params(env.dim(), derive_seed(cfg.policy.seed, Stream::kInit, 0)), cfg.learning);
  }

  OnlineResult result;
  result.metrics.reserve(horizon);
  result.exhaust.reserve(horizon);
  if (cfg.track_regret) result.cumulative_regret.reserve(horizon);

  double loss_sum = 0.0;
  double regret_sum = 0.0;
  std::vector<Example> batch;
  batch.reserve(cfg.batch_size);

  for (std::size_t t = 0; t < horizon; ++t) {
    const std::int64_t round = static_cast<std::int64_t>(t) + 1;
    PolicyConfig round_cfg = cfg.policy;
    round_cfg.gamma = scheduled_gamma(cfg, t + 1, horizon);
    Rng rng(derive_seed(cfg.policy.seed, Stream::kPolicy, t));
    const Context& x = env.context(t);

    RoundOutcome out;
    switch (cfg.algorithm) {
      case Algorithm::kCappedIgw:
        out = capped_round(*model, x, round_cfg, rng, cfg.trace);
        break;
      case Algorithm::kSmoothIgw:
        out = smooth_round(*model, x, round_cfg, rng);
        break;
      case Algorithm::kUniform:
        out = uniform_round(rng);
        break;
    }

    const double loss = env.loss(t, out.action);
    loss_sum += loss;

    RoundMetrics m;
    m.round = round;
    m.loss = loss;
    m.pv_loss = loss_sum / static_cast<double>(t + 1);
    m.beta = out.beta;
    m.normcs_samples = out.normcs_samples;
    m.rejection_draws = out.rejection_draws;
    m.greedy_mass = out.greedy_mass;
    m.kappa_hat = out.kappa_hat;
    result.metrics.push_back(m);

    ExhaustRecord r;
    r.round = round;
    r.context = x;
    r.action = out.action;
    r.propensity = out.propensity;
    r.loss = loss;
    r.is_greedy = out.is_greedy;
    r.algorithm = cfg.algorithm;
    r.beta = out.beta;
    r.tau = round_cfg.tau;
    r.gamma = round_cfg.gamma;
    r.kappa_inf = round_cfg.kappa_inf;
    result.exhaust.push_back(std::move(r));

    if (cfg.track_regret) {
      regret_sum += loss - env.benchmark(t, cfg.policy.tau);
      result.cumulative_regret.push_back(regret_sum);
    }

    batch.push_back(Example{x, out.action, loss, 1.0});
    if (batch.size() == cfg.batch_size || t + 1 == horizon) {
      model = model->updated(batch);
      batch.clear();
    }
  }
  return result;
}

std::vector<double> greedy_fraction(const std::vector<ExhaustRecord>& exhaust,
                                    std::size_t window) {
  if (window < 1) throw InvalidConfig("greedy_fraction: window must be >= 1");
  std::vector<double> out;
  for (std::size_t start = 0; start < exhaust.size(); start += window) {
    const std::size_t end = std::min(start + window, exhaust.size());
    std::size_t greedy = 0;
    for (std::size_t i = start; i < end; ++i) greedy += exhaust[i].is_greedy ? 1 : 0;
    out.push_back(static_cast<double>(greedy) / static_cast<double>(end - start));
  }
  return out;
}

}  // namespace cigw
