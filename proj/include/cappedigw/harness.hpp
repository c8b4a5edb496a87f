#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cappedigw/core.hpp"
#include "cappedigw/exhaust.hpp"
#include "cappedigw/normcs.hpp"
#include "cappedigw/policy.hpp"
#include "cappedigw/regression.hpp"

namespace cigw {

struct Row {
  std::vector<double> features;
  double target = 0.0;
};

struct Dataset {
  std::string name;
  std::vector<Row> rows;

  std::size_t size() const { return rows.size(); }
  std::size_t dim() const { return rows.empty() ? 0 : rows.front().features.size(); }
};

/// Bad CSV content. The message names the 1-based row and column.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads numeric CSV text; the last column is the target. Blank lines are skipped.
Dataset parse_csv(std::istream& in, bool has_header, const std::string& name = "");

/// Per-column (v - min) / (max - min), target included; constant columns become 0.
/// Throws DataError for fewer than two rows.
void min_max_scale(Dataset& ds);

/// Reads `path`, shuffles rows with `seed`, keeps the first `max_rows`, then scales.
Dataset load_and_scale(const std::string& path, std::size_t max_rows, std::uint64_t seed,
                       bool has_header = false);

inline double bandit_loss(double y, double action) { return y > action ? y - action : action - y; }

/// A stream of rounds with a known mean loss, so regret can be measured.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string name() const = 0;
  virtual std::size_t size() const = 0;
  virtual std::size_t dim() const = 0;
  virtual const Context& context(std::size_t t) const = 0;
  /// Observed loss of `action` at round t (deterministic for the shipped environments).
  virtual double loss(std::size_t t, double action) const = 0;
  /// Supervised target of round t, when there is one.
  virtual std::optional<double> target(std::size_t) const { return std::nullopt; }
  /// Smooth_tau benchmark for round t's mean loss.
  virtual double benchmark(std::size_t t, double tau) const = 0;
};

/// Supervised rows turned into bandit feedback |y - a|.
class SupervisedEnv final : public Environment {
 public:
  explicit SupervisedEnv(Dataset ds);

  std::string name() const override { return name_; }
  std::size_t size() const override { return contexts_.size(); }
  std::size_t dim() const override { return dim_; }
  const Context& context(std::size_t t) const override { return contexts_[t]; }
  double loss(std::size_t t, double action) const override {
    return bandit_loss(targets_[t], action);
  }
  std::optional<double> target(std::size_t t) const override { return targets_[t]; }
  /// Closed form: density tau on the length-1/tau window around y, pushed inside [0, 1].
  double benchmark(std::size_t t, double tau) const override;

 private:
  std::string name_;
  std::size_t dim_ = 0;
  std::vector<Context> contexts_;
  std::vector<double> targets_;
};

/// Smooth_tau benchmark of a |y - a| loss on [0, 1].
double absolute_loss_benchmark(double y, double tau);

/// Needle loss 1{2 a tau > 1}: zero on [0, 1/(2 tau)], one elsewhere.
double needle_loss(double action, double needle_tau);

/// Contextless stream whose loss is the needle indicator.
class NeedleEnv final : public Environment {
 public:
  NeedleEnv(double needle_tau, std::size_t horizon);

  std::string name() const override { return "needle"; }
  std::size_t size() const override { return horizon_; }
  std::size_t dim() const override { return 0; }
  const Context& context(std::size_t) const override { return empty_; }
  double loss(std::size_t, double action) const override {
    return needle_loss(action, needle_tau_);
  }
  double benchmark(std::size_t, double tau) const override;

  double needle_tau() const { return needle_tau_; }

 private:
  double needle_tau_;
  std::size_t horizon_;
  Context empty_;
};

/// Fixed loss model equal to the needle indicator. Updates are no-ops.
class NeedleModel final : public LossModel {
 public:
  explicit NeedleModel(double needle_tau) : needle_tau_(needle_tau) {}

  double predict(const Context&, double action) const override {
    return needle_loss(action, needle_tau_);
  }
  std::optional<double> exact_argmin(const Context&) const override { return 0.0; }
  std::unique_ptr<LossModel> updated(std::span<const Example>) const override { return clone(); }
  std::unique_ptr<LossModel> clone() const override {
    return std::make_unique<NeedleModel>(*this);
  }

 private:
  double needle_tau_;
};

struct LinearTruth {
  std::vector<double> w;
  double b = 0.0;
};

/// Seeded w* ~ Uniform(-3, 3)^d and b* centring the logit at x = (1/2, ..., 1/2).
LinearTruth draw_linear_truth(std::size_t dim, std::uint64_t seed);

/// T rows with x ~ Uniform[0,1]^d and y = sigmoid(<x, w*> + b*).
Dataset linear_dataset(const LinearTruth& truth, std::size_t horizon, std::uint64_t seed);

enum class EnvKind { kNeedle, kLinear };

struct SyntheticParams {
  std::size_t dim = 5;
  double needle_tau = 2.0;
  std::optional<LinearTruth> truth;  // drawn from the seed when empty
};

std::unique_ptr<Environment> synthetic_env(EnvKind kind, const SyntheticParams& params,
                                           std::size_t horizon, std::uint64_t seed);

/// How gamma is chosen each round.
enum class GammaSchedule {
  kFixed,    // PolicyConfig::gamma as given
  kHorizon,  // exploration_gamma(T, kappa_inf, tau, regsq(T)) for the stream length T
  kGrowing,  // exploration_gamma(t, kappa_inf, tau, max(log t, 1)) at round t
};

struct OnlineRunConfig {
  Algorithm algorithm = Algorithm::kCappedIgw;
  PolicyConfig policy;
  std::size_t batch_size = 8;
  GammaSchedule gamma_schedule = GammaSchedule::kHorizon;
  LearningConfig learning;
  bool track_regret = false;
  CsTrace trace;  // receives NormCS rows of every CappedIGW round

  void validate() const;
};

/// gamma used at 1-based round t of a stream of length `horizon`.
double scheduled_gamma(const OnlineRunConfig& cfg, std::size_t t, std::size_t horizon);

struct OnlineResult {
  std::vector<RoundMetrics> metrics;
  std::vector<ExhaustRecord> exhaust;
  // Cumulative smooth regret after each round (filled when track_regret is set).
  std::vector<double> cumulative_regret;

  double final_pv_loss() const { return metrics.empty() ? 0.0 : metrics.back().pv_loss; }
};

/// Runs the configured policy over the stream. Each batch of `batch_size`
/// rounds is played against one model snapshot, then the model is updated
/// with the whole batch. With no model given, a fresh OnlineRegressor is
/// initialised from the run seed.
OnlineResult run_online(const Environment& env, const OnlineRunConfig& cfg,
                        std::unique_ptr<LossModel> model = nullptr);

/// Means of is_greedy over consecutive windows; the last window may be shorter.
std::vector<double> greedy_fraction(const std::vector<ExhaustRecord>& exhaust,
                                    std::size_t window);

}  // namespace cigw
