#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cappedigw/core.hpp"

namespace cigw {

/// Adaptive-moment step rule.
struct LearningConfig {
  double learning_rate = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t step = 0;
};

/// In-place bias-corrected Adam update of `params` along `grad`.
void adam_step(std::span<double> params, std::span<const double> grad, AdamState& state,
               const LearningConfig& cfg);

/// One (context, action, loss) observation with an optional importance weight.
struct Example {
  Context x;
  double action = 0.0;
  double loss = 0.0;
  double weight = 1.0;
};

/// Online square-loss regression oracle. Implementations are immutable
/// values: `updated` returns the next state and leaves `*this` unchanged.
class LossModel {
 public:
  virtual ~LossModel() = default;

  /// Predicted loss in [0, 1].
  virtual double predict(const Context& x, double action) const = 0;

  /// Closed-form minimizer of predict(x, .) when the model can certify one.
  virtual std::optional<double> exact_argmin(const Context& x) const = 0;

  /// Predicted loss as a function of the action alone, for one context.
  /// The returned callable borrows `*this`.
  virtual std::function<double(double)> frozen(const Context& x) const;

  virtual std::unique_ptr<LossModel> updated(std::span<const Example> batch) const = 0;
  virtual std::unique_ptr<LossModel> clone() const = 0;
};

/// Minimizer of `f` over the grid {0, 1/(n-1), ..., 1}; ties go to the first point.
double grid_argmin(const std::function<double(double)>& f, int points = 1000);

// ---------------------------------------------------------------------------
// Argmin-plus-dispersion regressor: the predicted loss is a V-shaped function
// of z = head(x) - a whose bottom sits at the head's output.

using Coeffs3 = std::array<double, 3>;

struct RegressorParams {
  double u = 0.0;
  std::vector<double> w;
  double q = 0.0;
  Coeffs3 w_plus{};
  Coeffs3 zeta{};

  bool operator==(const RegressorParams&) const = default;
};

/// Uniform(-0.1, 0.1) weights, zero biases.
RegressorParams init_params(std::size_t dim, std::uint64_t seed);

double greedy_action(const RegressorParams& params, const Context& x);
double predict(const RegressorParams& params, const Context& x, double action);

/// True when all six dispersion coefficients are non-negative, in which case
/// greedy_action is a global minimizer of predict.
bool has_exact_argmin(const RegressorParams& params);

/// Gradient of the mean over `batch` of weight * (predict - loss)^2, in the
/// field order of RegressorParams. The clamp to [0, 1] is differentiated as
/// the identity (straight-through); at interior predictions this is exact.
RegressorParams loss_gradient(const RegressorParams& params, std::span<const Example> batch);

double mean_squared_loss(const RegressorParams& params, std::span<const Example> batch);

std::string params_to_json(const RegressorParams& params);
RegressorParams params_from_json(const std::string& text);

class OnlineRegressor final : public LossModel {
 public:
  OnlineRegressor(RegressorParams params, LearningConfig cfg);

  const RegressorParams& params() const { return params_; }
  const AdamState& optimizer() const { return adam_; }

  double predict(const Context& x, double action) const override;
  std::optional<double> exact_argmin(const Context& x) const override;
  std::function<double(double)> frozen(const Context& x) const override;
  std::unique_ptr<LossModel> updated(std::span<const Example> batch) const override;
  std::unique_ptr<LossModel> clone() const override;

  /// Same as updated(), by value.
  OnlineRegressor step(std::span<const Example> batch) const;

 private:
  RegressorParams params_;
  LearningConfig cfg_;
  AdamState adam_;
};

// ---------------------------------------------------------------------------
// Offline family: the linear head is replaced by a ReLU network with a
// sigmoid output; the dispersion part is unchanged.

struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;  // row-major, out x in
  std::vector<double> bias;
};

struct MlpParams {
  std::vector<DenseLayer> layers;
  double q = 0.0;
  Coeffs3 w_plus{};
  Coeffs3 zeta{};
};

/// `depth` dense layers; all but the last have `width` ReLU units, the last
/// has a single sigmoid unit. Weights are Uniform(-s, s) with s = 1/sqrt(fan_in).
MlpParams init_mlp(std::size_t dim, std::size_t depth, std::size_t width, std::uint64_t seed);

double mlp_head(const MlpParams& params, const Context& x);
double mlp_predict(const MlpParams& params, const Context& x, double action);

std::vector<double> flatten(const MlpParams& params);
void unflatten(MlpParams& params, std::span<const double> flat);

/// Flat gradient (see flatten) of the mean weighted squared loss over `batch`.
std::vector<double> mlp_loss_gradient(const MlpParams& params, std::span<const Example> batch);
double mlp_mean_squared_loss(const MlpParams& params, std::span<const Example> batch);

class MlpRegressor final : public LossModel {
 public:
  MlpRegressor(MlpParams params, LearningConfig cfg);

  const MlpParams& params() const { return params_; }
  double head(const Context& x) const { return mlp_head(params_, x); }

  double predict(const Context& x, double action) const override;
  std::optional<double> exact_argmin(const Context& x) const override;
  std::unique_ptr<LossModel> updated(std::span<const Example> batch) const override;
  std::unique_ptr<LossModel> clone() const override;

  MlpRegressor step(std::span<const Example> batch) const;

 private:
  MlpParams params_;
  LearningConfig cfg_;
  AdamState adam_;
};

}  // namespace cigw
