#include "cappedigw/core.hpp"

#include <algorithm>
#include <cmath>

namespace cigw {

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kCappedIgw:
      return "capped_igw";
    case Algorithm::kSmoothIgw:
      return "smooth_igw";
    case Algorithm::kUniform:
      return "uniform";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view tag) {
  if (tag == "capped_igw" || tag == "capped") return Algorithm::kCappedIgw;
  if (tag == "smooth_igw" || tag == "smooth") return Algorithm::kSmoothIgw;
  if (tag == "uniform") return Algorithm::kUniform;
  throw InvalidConfig("unknown algorithm tag: " + std::string(tag));
}

void PolicyConfig::validate() const {
  if (!(tau >= 1.0)) throw InvalidConfig("tau must be >= 1");
  if (!(gamma > 0.0)) throw InvalidConfig("gamma must be > 0");
  if (!(kappa_inf > 1.0)) throw InvalidConfig("kappa_inf must be > 1");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidConfig("delta must lie in (0, 1)");
  if (n_max < 0) throw InvalidConfig("n_max must be non-negative");
  if (horizon < 1) throw InvalidConfig("horizon must be positive");
  if (regsq_estimate < 0.0) throw InvalidConfig("regsq_estimate must be non-negative");
}

double PolicyConfig::regsq() const {
  if (regsq_estimate > 0.0) return regsq_estimate;
  // log(1) = 0 would make gamma infinite.
  return std::max(std::log(static_cast<double>(horizon)), 1.0);
}

double exploration_gamma(double horizon, double kappa_inf, double tau, double regsq) {
  if (!(horizon > 0.0 && kappa_inf > 0.0 && tau > 0.0 && regsq > 0.0)) {
    throw InvalidConfig("exploration_gamma: all inputs must be positive");
  }
  return std::sqrt(8.0 * horizon * kappa_inf * tau / regsq);
}

double smooth_benchmark(const std::function<double(double)>& mean_loss, double tau,
                        int resolution) {
  if (!(tau >= 1.0)) throw InvalidConfig("smooth_benchmark: tau must be >= 1");
  if (resolution < 2) throw InvalidConfig("smooth_benchmark: resolution must be >= 2");

  const auto n = static_cast<std::size_t>(resolution);
  std::vector<double> losses(n);
  for (std::size_t i = 0; i < n; ++i) {
    losses[i] = mean_loss((static_cast<double>(i) + 0.5) / static_cast<double>(n));
  }
  std::sort(losses.begin(), losses.end());

  const double cell_mass = tau / static_cast<double>(n);
  double remaining = 1.0;
  double value = 0.0;
  for (double loss : losses) {
    const double take = std::min(cell_mass, remaining);
    value += take * loss;
    remaining -= take;
    if (remaining <= 0.0) break;
  }
  return value;
}

}  // namespace cigw
