#include "cappedigw/offline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace cigw {

std::string_view to_string(OfflineMethod method) {
  return method == OfflineMethod::kDirect ? "direct" : "clipped_ips";
}

OfflineMethod parse_offline_method(std::string_view tag) {
  if (tag == "direct") return OfflineMethod::kDirect;
  if (tag == "clipped_ips") return OfflineMethod::kClippedIps;
  throw InvalidConfig("unknown offline method '" + std::string(tag) + "'");
}

void OfflineConfig::validate() const {
  if (!(weight_cap >= 1.0)) throw InvalidConfig("weight_cap must be >= 1");
  for (double f : split) {
    if (!(f >= 0.0)) throw InvalidConfig("split fractions must be non-negative");
  }
  if (std::abs(split[0] + split[1] + split[2] - 1.0) > 1e-9) {
    throw InvalidConfig("split fractions must sum to 1");
  }
  if (patience < 1) throw InvalidConfig("patience must be >= 1");
  if (max_epochs < 1) throw InvalidConfig("max_epochs must be >= 1");
  if (depth < 1) throw InvalidConfig("depth must be >= 1");
  if (minibatch < 1) throw InvalidConfig("minibatch must be >= 1");
}

double importance_weight(const ExhaustRecord& record, double cap) {
  if (record.is_greedy) return cap;
  if (!(record.propensity > 0.0)) {
    throw DataError("round " + std::to_string(record.round) +
                    ": non-greedy record without positive propensity");
  }
  return std::min(1.0 / record.propensity, cap);
}

std::vector<LabeledRecord> label_exhaust(const std::vector<ExhaustRecord>& exhaust,
                                         const Environment& env) {
  std::vector<LabeledRecord> out;
  out.reserve(exhaust.size());
  for (const auto& r : exhaust) {
    const auto t = static_cast<std::size_t>(r.round - 1);
    const auto y = r.round >= 1 && t < env.size() ? env.target(t) : std::nullopt;
    if (!y) throw DataError("round " + std::to_string(r.round) + ": no target available");
    out.push_back({r, *y});
  }
  return out;
}

std::vector<Example> training_examples(std::span<const LabeledRecord> rows,
                                       OfflineMethod method, double cap) {
  std::vector<Example> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    const auto& r = row.record;
    const double w = method == OfflineMethod::kDirect ? 1.0 : importance_weight(r, cap);
    out.push_back(Example{r.context, r.action, r.loss, w});
  }
  return out;
}

MlpRegressor train_epoch(const MlpRegressor& model, std::span<const Example> examples,
                         std::size_t minibatch, Rng& rng) {
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  shuffle(order, rng);
  MlpRegressor current = model;
  std::vector<Example> batch;
  batch.reserve(minibatch);
  for (std::size_t start = 0; start < order.size(); start += minibatch) {
    batch.clear();
    const std::size_t end = std::min(start + minibatch, order.size());
    for (std::size_t i = start; i < end; ++i) batch.push_back(examples[order[i]]);
    current = current.step(batch);
  }
  return current;
}

TrainResult train_offline(std::span<const LabeledRecord> train,
                          std::span<const LabeledRecord> validation, const OfflineConfig& cfg,
                          const ValidationScore& score) {
  cfg.validate();
  if (train.empty() || validation.empty()) {
    throw InvalidConfig("train_offline: train and validation must be non-empty");
  }
  const auto train_ex = training_examples(train, cfg.method, cfg.weight_cap);
  const auto val_ex = training_examples(validation, cfg.method, cfg.weight_cap);
  const std::size_t dim = train.front().record.context.dim();
  const std::size_t width = cfg.width > 0 ? cfg.width : std::max<std::size_t>(dim, 1);

  MlpRegressor model(init_mlp(dim, cfg.depth, width, derive_seed(cfg.seed, Stream::kOffline, 0)),
                     cfg.learning);
  const ValidationScore default_score = [&](const MlpRegressor& m, int) {
    return mlp_mean_squared_loss(m.params(), val_ex);
  };
  const ValidationScore& validate = score ? score : default_score;

  Rng rng(derive_seed(cfg.seed, Stream::kOffline, 2));
  TrainResult result{model, 0, 0, {}};
  double best = 0.0;
  int stale = 0;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    model = train_epoch(model, train_ex, cfg.minibatch, rng);
    const double v = validate(model, epoch);
    result.validation_curve.push_back(v);
    result.epochs_run = epoch;
    if (epoch == 1 || v < best) {
      best = v;
      result.model = model;
      result.best_epoch = epoch;
      stale = 0;
    } else if (++stale >= cfg.patience) {
      break;
    }
  }
  return result;
}

double evaluate_policy(const std::function<double(const Context&)>& policy,
                       std::span<const LabeledRecord> rows) {
  if (rows.empty()) return 0.0;
  double total = 0.0;
  for (const auto& row : rows) total += std::abs(row.target - policy(row.record.context));
  return total / static_cast<double>(rows.size());
}

double evaluate_policy(const MlpRegressor& model, std::span<const LabeledRecord> rows) {
  return evaluate_policy([&](const Context& x) { return model.head(x); }, rows);
}

OfflineOutcome run_offline(const std::vector<LabeledRecord>& rows, const OfflineConfig& cfg) {
  const auto parts = split_exhaust(rows, cfg.split, cfg.seed);
  const auto trained = train_offline(parts.train, parts.validation, cfg);
  OfflineOutcome out;
  out.method = cfg.method;
  out.validation_loss = evaluate_policy(trained.model, parts.validation);
  out.test_loss = evaluate_policy(trained.model, parts.test);
  out.best_epoch = trained.best_epoch;
  return out;
}

OfflineOutcome run_offline_best(const std::vector<LabeledRecord>& rows, OfflineConfig cfg) {
  cfg.method = OfflineMethod::kDirect;
  const auto direct = run_offline(rows, cfg);
  cfg.method = OfflineMethod::kClippedIps;
  const auto ips = run_offline(rows, cfg);
  return ips.validation_loss < direct.validation_loss ? ips : direct;
}

ValueEstimate ips_value(const std::vector<ExhaustRecord>& exhaust,
                        const std::function<double(const Context&, double)>& target_density,
                        std::span<const double> kappa_hat) {
  if (exhaust.size() < 2) throw InvalidConfig("ips_value: need at least two records");
  if (!kappa_hat.empty() && kappa_hat.size() != exhaust.size()) {
    throw InvalidConfig("ips_value: kappa_hat must match the exhaust length");
  }
  std::vector<double> terms(exhaust.size());
  for (std::size_t i = 0; i < exhaust.size(); ++i) {
    const auto& r = exhaust[i];
    if (r.is_greedy || !(r.propensity > 0.0)) {
      throw DataError("round " + std::to_string(r.round) + ": record has no density");
    }
    const double k = kappa_hat.empty() ? 1.0 : kappa_hat[i];
    terms[i] = target_density(r.context, r.action) / (k * r.propensity) * r.loss;
  }
  const double n = static_cast<double>(terms.size());
  const double mean = std::accumulate(terms.begin(), terms.end(), 0.0) / n;
  double ss = 0.0;
  for (double t : terms) ss += (t - mean) * (t - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace cigw
