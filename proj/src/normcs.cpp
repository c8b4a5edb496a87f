#include "cappedigw/normcs.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>

namespace cigw {

double g_eval(const GFunction& gf, double action, double beta) { return gf(action, beta); }

double z_oracle(const GFunction& gf, double beta, int n_quad) {
  if (n_quad < 100) throw InvalidConfig("z_oracle: n_quad must be >= 100");
  double total = 0.0;
  for (int i = 0; i < n_quad; ++i) {
    total += gf((static_cast<double>(i) + 0.5) / static_cast<double>(n_quad), beta);
  }
  return total / static_cast<double>(n_quad);
}

std::int64_t backstop_sample_count(double tau, double gamma, double delta) {
  const double log_terms = std::log(2.0 * std::numbers::ln2) + std::log(tau + gamma) -
                           std::log(delta);
  return static_cast<std::int64_t>(std::ceil((8.0 * 26.0 / 3.0) * tau * log_terms));
}

std::vector<double> backstop_grid(double tau, double gamma) {
  const double lo = (1.0 - tau) / gamma;
  const double hi = 1.0;
  const double step = std::numbers::ln2 / gamma;
  const auto intervals = static_cast<std::size_t>(std::ceil((hi - lo) / step));
  std::vector<double> grid(intervals + 1);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    grid[k] = std::min(lo + static_cast<double>(k) * step, hi);
  }
  return grid;
}

BackstopResult backstop_beta(const GFunction& gf, double delta, const ActionSpace& space,
                             Rng& rng) {
  const std::int64_t n = backstop_sample_count(gf.tau, gf.gamma, delta);
  std::vector<double> values(static_cast<std::size_t>(n));
  for (auto& v : values) v = gf.fhat(space.sample(rng));

  const auto zbar = [&](double beta) {
    double total = 0.0;
    for (double f : values) total += gf.of_value(f, beta);
    return total / static_cast<double>(values.size());
  };

  // The batch is shared, so zbar is non-decreasing along the grid. The window
  // rule and its first fallback then both pick the last grid point with
  // zbar <= 3/8, which a binary search finds.
  const auto grid = backstop_grid(gf.tau, gf.gamma);
  const auto first_above = std::partition_point(
      grid.begin(), grid.end(), [&](double beta) { return zbar(beta) <= 3.0 / 8.0; });
  if (first_above == grid.begin()) return {gf.beta_min(), n};
  return {*std::prev(first_above), n};
}

double ons_step(OnsAccumulator& acc, double grad, double lo, double hi) {
  constexpr double kScale = 2.0 / (2.0 - 1.0986122886681098);  // 2 / (2 - ln 3)
  acc.grad_sq_sum += grad * grad;
  acc.bet = std::clamp(acc.bet - kScale * grad / (1.0 + acc.grad_sq_sum), lo, hi);
  return acc.bet;
}

BettingState BettingState::start(const GFunction& gf, double kappa_inf) {
  BettingState s;
  s.lower_cap = 1.0 / (2.0 * gf.tau);
  s.upper_cap = kappa_inf / 2.0;
  s.ons_lower.bet = 1.0 / (4.0 * gf.tau);
  s.ons_upper.bet = kappa_inf / 4.0;
  s.lower = gf.beta_min();
  s.upper = gf.beta_max();
  return s;
}

namespace {

// Sums log(factor(m)) over all samples. Factors lie in (1/2, 1 + kappa_inf*tau/2]
// under the bet caps, so products of eight of them stay well inside double
// range and one log per block suffices.
template <typename Factor>
double sum_log_factors(std::size_t n, Factor factor) {
  constexpr std::size_t kBlock = 8;
  double total = 0.0;
  std::size_t m = 0;
  for (; m + kBlock <= n; m += kBlock) {
    double product = 1.0;
    for (std::size_t k = 0; k < kBlock; ++k) product *= factor(m + k);
    total += std::log(product);
  }
  for (; m < n; ++m) total += std::log(factor(m));
  return total;
}

}  // namespace

double log_wealth(const BettingState& state, const GFunction& gf, double beta, Side side,
                  double kappa_inf) {
  const std::size_t n = state.size();
  if (side == Side::kLower) {
    return sum_log_factors(n, [&](std::size_t m) {
      const double step = state.lower_bets[m] * (1.0 - gf.of_value(state.fhat_values[m], beta));
      assert(step > -1.0);
      return 1.0 + step;
    });
  }
  const double floor = 1.0 / kappa_inf;
  return sum_log_factors(n, [&](std::size_t m) {
    const double step = state.upper_bets[m] * (gf.of_value(state.fhat_values[m], beta) - floor);
    assert(step > -1.0);
    return 1.0 + step;
  });
}

double wealth_eval(const BettingState& state, const GFunction& gf, double beta, Side side,
                   double kappa_inf) {
  return std::exp(log_wealth(state, gf, beta, side, kappa_inf));
}

double refine_boundary(const std::function<double(double)>& margin, double inside,
                       double outside, double tol) {
  double m_in = margin(inside);
  double m_out = margin(outside);
  assert(m_in >= 0.0 && m_out < 0.0);
  int last = 0;  // +1: `inside` moved last, -1: `outside` moved last
  while (std::abs(outside - inside) > tol) {
    const double dir = outside > inside ? 1.0 : -1.0;
    const double width = std::abs(outside - inside);
    // Illinois step, kept at least tol/2 away from both ends so the bracket
    // always shrinks.
    double t = m_in / (m_in - m_out);
    if (!std::isfinite(t)) t = 0.5;
    const double lo_frac = 0.5 * tol / width;
    t = std::clamp(t, lo_frac, 1.0 - lo_frac);
    const double c = inside + dir * t * width;
    const double m_c = margin(c);
    if (m_c >= 0.0) {
      inside = c;
      m_in = m_c;
      if (last == 1) m_out *= 0.5;
      last = 1;
    } else {
      outside = c;
      m_out = m_c;
      if (last == -1) m_in *= 0.5;
      last = -1;
    }
  }
  return inside;
}

CsBounds betting_update(BettingState& state, const GFunction& gf, double action,
                        double kappa_inf, double delta) {
  const double f = gf.fhat(action);
  const double nu = state.ons_lower.bet;
  const double v = state.ons_upper.bet;
  state.actions.push_back(action);
  state.fhat_values.push_back(f);
  state.lower_bets.push_back(nu);
  state.upper_bets.push_back(v);

  const double threshold = std::log(2.0 / delta);
  const double tol = 1e-9 * (gf.beta_max() - gf.beta_min());
  const double prev_lower = state.lower;
  const double prev_upper = state.upper;

  // Wealth at the current bounds is carried forward one factor at a time;
  // full passes over the samples happen only when a bound moves.
  state.log_wealth_at_lower += std::log1p(nu * (1.0 - gf.of_value(f, prev_lower)));
  state.log_wealth_at_upper += std::log1p(v * (gf.of_value(f, prev_upper) - 1.0 / kappa_inf));

  // W- is non-increasing in beta, so the rejected set is an interval
  // [beta_min, L]. The bound only moves when the previous L is rejected.
  const auto lower_margin = [&](double beta) {
    return log_wealth(state, gf, beta, Side::kLower, kappa_inf) - threshold;
  };
  if (state.lower < gf.beta_max() && state.log_wealth_at_lower >= threshold) {
    if (lower_margin(gf.beta_max()) >= 0.0) {
      state.lower = gf.beta_max();
    } else {
      state.lower = refine_boundary(lower_margin, prev_lower, gf.beta_max(), tol);
    }
    state.log_wealth_at_lower = log_wealth(state, gf, state.lower, Side::kLower, kappa_inf);
  }

  // W+ is non-decreasing in beta: rejected set [U, beta_max].
  const auto upper_margin = [&](double beta) {
    return log_wealth(state, gf, beta, Side::kUpper, kappa_inf) - threshold;
  };
  if (state.upper > gf.beta_min() && state.log_wealth_at_upper >= threshold) {
    if (upper_margin(gf.beta_min()) >= 0.0) {
      state.upper = gf.beta_min();
    } else {
      state.upper = refine_boundary(upper_margin, prev_upper, gf.beta_min(), tol);
    }
    state.log_wealth_at_upper = log_wealth(state, gf, state.upper, Side::kUpper, kappa_inf);
  }

  // Bets for the next sample: ONS on -log(1 + bet * payoff), with the payoff
  // evaluated at the previous round's bound.
  const double y_lower = 1.0 - gf.of_value(f, prev_lower);
  const double y_upper = gf.of_value(f, prev_upper) - 1.0 / kappa_inf;
  ons_step(state.ons_lower, -y_lower / (1.0 + nu * y_lower), 0.0, state.lower_cap);
  ons_step(state.ons_upper, -y_upper / (1.0 + v * y_upper), 0.0, state.upper_cap);

  return {state.lower, state.upper};
}

NormCsResult normalization_cs(const GFunction& gf, double delta, double kappa_inf,
                              std::int64_t n_max, const ActionSpace& space, Rng& rng,
                              const CsTrace& trace) {
  auto state = BettingState::start(gf, kappa_inf);
  for (std::int64_t n = 1; n <= n_max; ++n) {
    const auto bounds = betting_update(state, gf, space.sample(rng), kappa_inf, delta);
    if (trace) {
      trace({n, bounds.lower, bounds.upper, state.lower_bets.back(), state.upper_bets.back()});
    }
    if (bounds.lower > bounds.upper) {
      return {bounds.lower, n, n, false};
    }
  }
  const auto fallback = backstop_beta(gf, delta, space, rng);
  return {fallback.beta, n_max + fallback.n_used, n_max, true};
}

}  // namespace cigw
