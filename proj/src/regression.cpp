#include "cappedigw/regression.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include <json.hpp>

#include "cappedigw/rng.hpp"

namespace cigw {

void adam_step(std::span<double> params, std::span<const double> grad, AdamState& state,
               const LearningConfig& cfg) {
  assert(params.size() == grad.size());
  if (state.m.size() != params.size()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
    state.step = 0;
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grad[i];
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    params[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
  }
}

std::function<double(double)> LossModel::frozen(const Context& x) const {
  return [this, x](double a) { return predict(x, a); };
}

double grid_argmin(const std::function<double(double)>& f, int points) {
  double best_a = 0.0;
  double best_v = f(0.0);
  for (int i = 1; i < points; ++i) {
    const double a = static_cast<double>(i) / static_cast<double>(points - 1);
    const double v = f(a);
    if (v < best_v) {
      best_v = v;
      best_a = a;
    }
  }
  return best_a;
}

namespace {

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

struct DispersionEval {
  double raw = 0.0;
  double d_dz = 0.0;
  Coeffs3 d_plus{};
  Coeffs3 d_zeta{};
};

// Right branch for z >= 0, left branch on |z| otherwise. The |z|^{3/2} term
// has zero derivative at the origin, so d_dz stays finite everywhere.
DispersionEval eval_dispersion(double q, const Coeffs3& plus, const Coeffs3& zeta, double z) {
  DispersionEval e;
  const double r = std::abs(z);
  const double sr = std::sqrt(r);
  const Coeffs3 basis{r, r * sr, r * r};
  if (z >= 0.0) {
    e.raw = q + plus[0] * basis[0] + plus[1] * basis[1] + plus[2] * basis[2];
    e.d_dz = plus[0] + 1.5 * plus[1] * sr + 2.0 * plus[2] * r;
    e.d_plus = basis;
  } else {
    e.raw = q + zeta[0] * basis[0] + zeta[1] * basis[1] + zeta[2] * basis[2];
    e.d_dz = -(zeta[0] + 1.5 * zeta[1] * sr + 2.0 * zeta[2] * r);
    e.d_zeta = basis;
  }
  return e;
}

bool all_nonnegative(const Coeffs3& a) {
  return std::all_of(a.begin(), a.end(), [](double c) { return c >= 0.0; });
}

double uniform_in(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

std::vector<double> to_flat(const RegressorParams& p) {
  std::vector<double> flat;
  flat.reserve(p.w.size() + 8);
  flat.push_back(p.u);
  flat.insert(flat.end(), p.w.begin(), p.w.end());
  flat.push_back(p.q);
  flat.insert(flat.end(), p.w_plus.begin(), p.w_plus.end());
  flat.insert(flat.end(), p.zeta.begin(), p.zeta.end());
  return flat;
}

void from_flat(RegressorParams& p, std::span<const double> flat) {
  std::size_t k = 0;
  p.u = flat[k++];
  for (auto& wi : p.w) wi = flat[k++];
  p.q = flat[k++];
  for (auto& c : p.w_plus) c = flat[k++];
  for (auto& c : p.zeta) c = flat[k++];
}

void check_dim(const RegressorParams& p, const Context& x) {
  if (p.w.size() != x.dim()) {
    throw std::invalid_argument("context dimension " + std::to_string(x.dim()) +
                                " does not match regressor dimension " +
                                std::to_string(p.w.size()));
  }
}

}  // namespace

RegressorParams init_params(std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  RegressorParams p;
  p.w.resize(dim);
  for (auto& wi : p.w) wi = uniform_in(rng, -0.1, 0.1);
  for (auto& c : p.w_plus) c = uniform_in(rng, -0.1, 0.1);
  for (auto& c : p.zeta) c = uniform_in(rng, -0.1, 0.1);
  return p;
}

double greedy_action(const RegressorParams& params, const Context& x) {
  check_dim(params, x);
  double t = params.u;
  for (std::size_t i = 0; i < x.dim(); ++i) t += params.w[i] * x.features[i];
  return sigmoid(t);
}

double predict(const RegressorParams& params, const Context& x, double action) {
  const double z = greedy_action(params, x) - action;
  return clamp01(eval_dispersion(params.q, params.w_plus, params.zeta, z).raw);
}

bool has_exact_argmin(const RegressorParams& params) {
  return all_nonnegative(params.w_plus) && all_nonnegative(params.zeta);
}

RegressorParams loss_gradient(const RegressorParams& params, std::span<const Example> batch) {
  RegressorParams g;
  g.w.assign(params.w.size(), 0.0);
  if (batch.empty()) return g;
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  for (const auto& ex : batch) {
    const double head = greedy_action(params, ex.x);
    const auto e = eval_dispersion(params.q, params.w_plus, params.zeta, head - ex.action);
    // Straight-through clamp: the error is taken at the clamped prediction,
    // so a saturated prediction still moves toward its target.
    const double c = 2.0 * ex.weight * (clamp01(e.raw) - ex.loss) * inv_n;
    const double dhead = c * e.d_dz * head * (1.0 - head);
    g.u += dhead;
    for (std::size_t i = 0; i < g.w.size(); ++i) g.w[i] += dhead * ex.x.features[i];
    g.q += c;
    for (int k = 0; k < 3; ++k) {
      g.w_plus[k] += c * e.d_plus[k];
      g.zeta[k] += c * e.d_zeta[k];
    }
  }
  return g;
}

double mean_squared_loss(const RegressorParams& params, std::span<const Example> batch) {
  if (batch.empty()) return 0.0;
  double total = 0.0;
  for (const auto& ex : batch) {
    const double d = predict(params, ex.x, ex.action) - ex.loss;
    total += ex.weight * d * d;
  }
  return total / static_cast<double>(batch.size());
}

std::string params_to_json(const RegressorParams& p) {
  nlohmann::json j;
  j["u"] = p.u;
  j["w"] = p.w;
  j["q"] = p.q;
  j["w_plus"] = p.w_plus;
  j["zeta"] = p.zeta;
  return j.dump();
}

RegressorParams params_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  RegressorParams p;
  p.u = j.at("u").get<double>();
  p.w = j.at("w").get<std::vector<double>>();
  p.q = j.at("q").get<double>();
  p.w_plus = j.at("w_plus").get<Coeffs3>();
  p.zeta = j.at("zeta").get<Coeffs3>();
  return p;
}

// --- OnlineRegressor -------------------------------------------------------

OnlineRegressor::OnlineRegressor(RegressorParams params, LearningConfig cfg)
    : params_(std::move(params)), cfg_(cfg) {}

double OnlineRegressor::predict(const Context& x, double action) const {
  return cigw::predict(params_, x, action);
}

std::optional<double> OnlineRegressor::exact_argmin(const Context& x) const {
  if (!has_exact_argmin(params_)) return std::nullopt;
  return greedy_action(params_, x);
}

std::function<double(double)> OnlineRegressor::frozen(const Context& x) const {
  const double head = greedy_action(params_, x);
  return [head, q = params_.q, plus = params_.w_plus, zeta = params_.zeta](double a) {
    return clamp01(eval_dispersion(q, plus, zeta, head - a).raw);
  };
}

OnlineRegressor OnlineRegressor::step(std::span<const Example> batch) const {
  OnlineRegressor next = *this;
  if (batch.empty()) return next;
  auto flat = to_flat(next.params_);
  const auto grad = to_flat(loss_gradient(next.params_, batch));
  adam_step(flat, grad, next.adam_, cfg_);
  from_flat(next.params_, flat);
  return next;
}

std::unique_ptr<LossModel> OnlineRegressor::updated(std::span<const Example> batch) const {
  return std::make_unique<OnlineRegressor>(step(batch));
}

std::unique_ptr<LossModel> OnlineRegressor::clone() const {
  return std::make_unique<OnlineRegressor>(*this);
}

// --- MLP head ---------------------------------------------------------------

MlpParams init_mlp(std::size_t dim, std::size_t depth, std::size_t width, std::uint64_t seed) {
  if (depth < 1) throw InvalidConfig("mlp depth must be >= 1");
  width = std::max<std::size_t>(width, 1);
  Rng rng(seed);
  MlpParams p;
  std::size_t in = dim;
  for (std::size_t l = 0; l < depth; ++l) {
    DenseLayer layer;
    layer.in = in;
    layer.out = (l + 1 == depth) ? 1 : width;
    const double s = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(in, 1)));
    layer.weights.resize(layer.in * layer.out);
    layer.bias.resize(layer.out);
    for (auto& v : layer.weights) v = uniform_in(rng, -s, s);
    for (auto& v : layer.bias) v = uniform_in(rng, -s, s);
    p.layers.push_back(std::move(layer));
    in = width;
  }
  for (auto& c : p.w_plus) c = uniform_in(rng, -0.1, 0.1);
  for (auto& c : p.zeta) c = uniform_in(rng, -0.1, 0.1);
  return p;
}

namespace {

// Activations of every layer; activations[0] is the input and the last entry
// holds the single pre-sigmoid output.
std::vector<std::vector<double>> forward(const MlpParams& p, const Context& x) {
  if (p.layers.empty() || p.layers.front().in != x.dim()) {
    throw std::invalid_argument("context dimension does not match network input");
  }
  std::vector<std::vector<double>> acts;
  acts.reserve(p.layers.size() + 1);
  acts.push_back(x.features);
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    const auto& layer = p.layers[l];
    const auto& h = acts.back();
    std::vector<double> next(layer.out);
    for (std::size_t o = 0; o < layer.out; ++o) {
      double s = layer.bias[o];
      const double* row = layer.weights.data() + o * layer.in;
      for (std::size_t i = 0; i < layer.in; ++i) s += row[i] * h[i];
      next[o] = (l + 1 == p.layers.size()) ? s : std::max(s, 0.0);
    }
    acts.push_back(std::move(next));
  }
  return acts;
}

std::size_t flat_size(const MlpParams& p) {
  std::size_t n = 7;
  for (const auto& l : p.layers) n += l.weights.size() + l.bias.size();
  return n;
}

}  // namespace

double mlp_head(const MlpParams& params, const Context& x) {
  return sigmoid(forward(params, x).back()[0]);
}

double mlp_predict(const MlpParams& params, const Context& x, double action) {
  const double z = mlp_head(params, x) - action;
  return clamp01(eval_dispersion(params.q, params.w_plus, params.zeta, z).raw);
}

std::vector<double> flatten(const MlpParams& p) {
  std::vector<double> flat;
  flat.reserve(flat_size(p));
  for (const auto& l : p.layers) {
    flat.insert(flat.end(), l.weights.begin(), l.weights.end());
    flat.insert(flat.end(), l.bias.begin(), l.bias.end());
  }
  flat.push_back(p.q);
  flat.insert(flat.end(), p.w_plus.begin(), p.w_plus.end());
  flat.insert(flat.end(), p.zeta.begin(), p.zeta.end());
  return flat;
}

void unflatten(MlpParams& p, std::span<const double> flat) {
  assert(flat.size() == flat_size(p));
  std::size_t k = 0;
  for (auto& l : p.layers) {
    for (auto& v : l.weights) v = flat[k++];
    for (auto& v : l.bias) v = flat[k++];
  }
  p.q = flat[k++];
  for (auto& c : p.w_plus) c = flat[k++];
  for (auto& c : p.zeta) c = flat[k++];
}

std::vector<double> mlp_loss_gradient(const MlpParams& p, std::span<const Example> batch) {
  std::vector<double> grad(flat_size(p), 0.0);
  if (batch.empty()) return grad;

  // Offsets of each layer's block inside the flat vector.
  std::vector<std::size_t> offset(p.layers.size());
  std::size_t dispersion_offset = 0;
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    offset[l] = dispersion_offset;
    dispersion_offset += p.layers[l].weights.size() + p.layers[l].bias.size();
  }

  const double inv_n = 1.0 / static_cast<double>(batch.size());
  for (const auto& ex : batch) {
    const auto acts = forward(p, ex.x);
    const double head = sigmoid(acts.back()[0]);
    const auto e = eval_dispersion(p.q, p.w_plus, p.zeta, head - ex.action);
    // Straight-through clamp: the error is taken at the clamped prediction,
    // so a saturated prediction still moves toward its target.
    const double c = 2.0 * ex.weight * (clamp01(e.raw) - ex.loss) * inv_n;

    grad[dispersion_offset] += c;
    for (int k = 0; k < 3; ++k) {
      grad[dispersion_offset + 1 + k] += c * e.d_plus[k];
      grad[dispersion_offset + 4 + k] += c * e.d_zeta[k];
    }

    std::vector<double> delta{c * e.d_dz * head * (1.0 - head)};
    for (std::size_t l = p.layers.size(); l-- > 0;) {
      const auto& layer = p.layers[l];
      const auto& input = acts[l];
      double* gw = grad.data() + offset[l];
      double* gb = gw + layer.weights.size();
      std::vector<double> back(layer.in, 0.0);
      for (std::size_t o = 0; o < layer.out; ++o) {
        if (delta[o] == 0.0) continue;
        const double* row = layer.weights.data() + o * layer.in;
        for (std::size_t i = 0; i < layer.in; ++i) {
          gw[o * layer.in + i] += delta[o] * input[i];
          back[i] += delta[o] * row[i];
        }
        gb[o] += delta[o];
      }
      if (l > 0) {
        // ReLU derivative of the layer that produced `input`.
        for (std::size_t i = 0; i < layer.in; ++i) {
          if (input[i] <= 0.0) back[i] = 0.0;
        }
      }
      delta = std::move(back);
    }
  }
  return grad;
}

double mlp_mean_squared_loss(const MlpParams& params, std::span<const Example> batch) {
  if (batch.empty()) return 0.0;
  double total = 0.0;
  for (const auto& ex : batch) {
    const double d = mlp_predict(params, ex.x, ex.action) - ex.loss;
    total += ex.weight * d * d;
  }
  return total / static_cast<double>(batch.size());
}

MlpRegressor::MlpRegressor(MlpParams params, LearningConfig cfg)
    : params_(std::move(params)), cfg_(cfg) {}

double MlpRegressor::predict(const Context& x, double action) const {
  return mlp_predict(params_, x, action);
}

std::optional<double> MlpRegressor::exact_argmin(const Context& x) const {
  if (!all_nonnegative(params_.w_plus) || !all_nonnegative(params_.zeta)) return std::nullopt;
  return head(x);
}

MlpRegressor MlpRegressor::step(std::span<const Example> batch) const {
  MlpRegressor next = *this;
  if (batch.empty()) return next;
  auto flat = flatten(next.params_);
  const auto grad = mlp_loss_gradient(next.params_, batch);
  adam_step(flat, grad, next.adam_, cfg_);
  unflatten(next.params_, flat);
  return next;
}

std::unique_ptr<LossModel> MlpRegressor::updated(std::span<const Example> batch) const {
  return std::make_unique<MlpRegressor>(step(batch));
}

std::unique_ptr<LossModel> MlpRegressor::clone() const {
  return std::make_unique<MlpRegressor>(*this);
}

}  // namespace cigw
