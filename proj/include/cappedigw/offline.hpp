#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "cappedigw/exhaust.hpp"
#include "cappedigw/harness.hpp"
#include "cappedigw/regression.hpp"
#include "cappedigw/rng.hpp"

namespace cigw {

enum class OfflineMethod { kDirect, kClippedIps };

std::string_view to_string(OfflineMethod method);
OfflineMethod parse_offline_method(std::string_view tag);

struct OfflineConfig {
  OfflineMethod method = OfflineMethod::kClippedIps;
  double weight_cap = 5.0;
  std::array<double, 3> split{0.8, 0.1, 0.1};
  int patience = 1;
  int max_epochs = 200;
  std::size_t depth = 3;
  std::size_t width = 0;  // zero selects the feature count
  std::size_t minibatch = 32;
  LearningConfig learning;
  std::uint64_t seed = 0;

  void validate() const;
};

template <typename T>
struct SplitParts {
  std::vector<T> train;
  std::vector<T> validation;
  std::vector<T> test;
};

/// Seeded shuffle, then contiguous train / validation / test parts. Part
/// sizes are floor(fraction * n) for the first two; the rest goes to test.
template <typename T>
SplitParts<T> split_exhaust(std::vector<T> records, const std::array<double, 3>& split,
                            std::uint64_t seed) {
  if (records.size() < 10) throw InvalidConfig("split_exhaust: need at least 10 records");
  Rng rng(derive_seed(seed, Stream::kOffline, 1));
  shuffle(records, rng);
  const double n = static_cast<double>(records.size());
  const auto n_train = static_cast<std::size_t>(split[0] * n + 1e-9);
  const auto n_val = static_cast<std::size_t>(split[1] * n + 1e-9);
  SplitParts<T> parts;
  const auto begin = std::make_move_iterator(records.begin());
  parts.train.assign(begin, begin + static_cast<std::ptrdiff_t>(n_train));
  parts.validation.assign(begin + static_cast<std::ptrdiff_t>(n_train),
                          begin + static_cast<std::ptrdiff_t>(n_train + n_val));
  parts.test.assign(begin + static_cast<std::ptrdiff_t>(n_train + n_val),
                    std::make_move_iterator(records.end()));
  return parts;
}

/// Greedy rows get `cap`; other rows min(1 / propensity, cap).
/// Throws DataError for a non-greedy row without positive propensity.
double importance_weight(const ExhaustRecord& record, double cap);

/// An exhaust record joined with the true target of its round.
struct LabeledRecord {
  ExhaustRecord record;
  double target = 0.0;
};

/// Joins records to env.target(round - 1). Throws DataError if the
/// environment has no target for a round.
std::vector<LabeledRecord> label_exhaust(const std::vector<ExhaustRecord>& exhaust,
                                         const Environment& env);

/// Weight 1 for the direct method, importance_weight for clipped IPS.
std::vector<Example> training_examples(std::span<const LabeledRecord> rows,
                                       OfflineMethod method, double cap);

/// One pass over `examples` in shuffled minibatches.
MlpRegressor train_epoch(const MlpRegressor& model, std::span<const Example> examples,
                         std::size_t minibatch, Rng& rng);

/// Validation score after an epoch (lower is better). `epoch` is 1-based.
using ValidationScore = std::function<double(const MlpRegressor& model, int epoch)>;

struct TrainResult {
  MlpRegressor model;
  int best_epoch = 0;
  int epochs_run = 0;
  std::vector<double> validation_curve;
};

/// Trains until the validation score has failed to improve for `patience`
/// epochs in a row (or `max_epochs`) and returns the best-scoring snapshot.
/// The default score is the weighted squared loss on `validation`.
TrainResult train_offline(std::span<const LabeledRecord> train,
                          std::span<const LabeledRecord> validation, const OfflineConfig& cfg,
                          const ValidationScore& score = {});

/// Mean of |y - policy(x)| over the rows.
double evaluate_policy(const std::function<double(const Context&)>& policy,
                       std::span<const LabeledRecord> rows);
/// Same with the model's greedy head as the policy.
double evaluate_policy(const MlpRegressor& model, std::span<const LabeledRecord> rows);

struct OfflineOutcome {
  OfflineMethod method = OfflineMethod::kDirect;
  double validation_loss = 0.0;  // on-policy, true labels
  double test_loss = 0.0;
  int best_epoch = 0;
};

/// Split, train with cfg.method, evaluate on the test part.
OfflineOutcome run_offline(const std::vector<LabeledRecord>& rows, const OfflineConfig& cfg);

/// Trains both methods on the same split and keeps the one with the lower
/// on-policy validation loss.
OfflineOutcome run_offline_best(const std::vector<LabeledRecord>& rows, OfflineConfig cfg);

struct ValueEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Importance-weighted estimate of the expected loss of a target policy with
/// density `target_density(x, a)` against mu. Each record is weighted by
/// density / (kappa_hat * propensity); an empty `kappa_hat` uses 1 throughout.
ValueEstimate ips_value(const std::vector<ExhaustRecord>& exhaust,
                        const std::function<double(const Context&, double)>& target_density,
                        std::span<const double> kappa_hat = {});

}  // namespace cigw
