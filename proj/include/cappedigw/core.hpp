#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cappedigw/rng.hpp"

namespace cigw {

class InvalidConfig : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Feature vector, each entry pre-scaled into [0, 1].
struct Context {
  std::vector<double> features;

  std::size_t dim() const { return features.size(); }
  bool operator==(const Context&) const = default;
};

/// Actions are reals in [0, 1]. The space owns the base measure through a
/// sampling procedure; only the unit interval with Lebesgue measure ships.
class ActionSpace {
 public:
  using Sampler = std::function<double(Rng&)>;

  static ActionSpace unit_interval() {
    return ActionSpace([](Rng& rng) { return rng.uniform(); });
  }

  double sample(Rng& rng) const { return sampler_(rng); }

 private:
  explicit ActionSpace(Sampler sampler) : sampler_(std::move(sampler)) {}
  Sampler sampler_;
};

enum class Algorithm { kCappedIgw, kSmoothIgw, kUniform };

std::string_view to_string(Algorithm algorithm);
Algorithm parse_algorithm(std::string_view tag);

struct PolicyConfig {
  double tau = 16.0;
  double gamma = 100.0;
  double kappa_inf = 4.0;
  double delta = 0.025;
  // Zero selects the backstop sample count for the round's (tau, gamma, delta).
  std::int64_t n_max = 0;
  std::int64_t horizon = 1000;
  double regsq_estimate = 0.0;  // zero selects log(horizon)
  std::uint64_t seed = 0;

  /// Throws InvalidConfig when an invariant is violated.
  void validate() const;
  double regsq() const;
};

/// Exploration parameter that balances the exploration and estimation terms
/// of the regret bound: sqrt(8 T kappa_inf tau / RegSq(T)).
double exploration_gamma(double horizon, double kappa_inf, double tau, double regsq);

/// Smallest expected loss of any tau-smoothed kernel against `mean_loss` on
/// [0, 1], computed on a midpoint grid: the optimal kernel puts density tau on
/// the lowest-loss cells until it has spent unit mass.
double smooth_benchmark(const std::function<double(double)>& mean_loss, double tau,
                        int resolution = 10000);

}  // namespace cigw
