#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "cappedigw/core.hpp"
#include "cappedigw/rng.hpp"

namespace cigw {

/// g(a; beta) = tau / (1 + gamma * (fhat(a) - beta)_+), the unnormalized
/// capped inverse-gap density for one frozen loss estimate fhat in [0, 1].
struct GFunction {
  std::function<double(double)> fhat;
  double gamma = 1.0;
  double tau = 1.0;

  double beta_min() const { return (1.0 - tau) / gamma; }
  double beta_max() const { return 1.0; }

  /// g expressed through the loss value rather than the action.
  double of_value(double fhat_value, double beta) const {
    const double gap = fhat_value - beta;
    return gap > 0.0 ? tau / (1.0 + gamma * gap) : tau;
  }
  double operator()(double action, double beta) const { return of_value(fhat(action), beta); }
};

double g_eval(const GFunction& gf, double action, double beta);

/// Midpoint-rule estimate of z(beta) = E_mu[g(., beta)] on the unit interval.
double z_oracle(const GFunction& gf, double beta, int n_quad = 100000);

// --- Fixed-sample Bernstein backstop ----------------------------------------

/// ceil((8 * 26 / 3) * tau * (ln(2 ln 2) + ln(tau + gamma) - ln(delta))).
std::int64_t backstop_sample_count(double tau, double gamma, double delta);

/// beta_min, beta_min + ln(2)/gamma, ..., with the last point clipped to beta_max.
std::vector<double> backstop_grid(double tau, double gamma);

struct BackstopResult {
  double beta = 0.0;
  std::int64_t n_used = 0;
};

/// Largest grid beta whose empirical z lands in [3/16, 3/8]; failing that the
/// largest with empirical z <= 3/8; failing that beta_min. One sample batch
/// is shared by every grid point.
BackstopResult backstop_beta(const GFunction& gf, double delta, const ActionSpace& space,
                             Rng& rng);

// --- Betting confidence sequence ---------------------------------------------

/// Online Newton step accumulator for one bet sequence.
struct OnsAccumulator {
  double bet = 0.0;
  double grad_sq_sum = 0.0;
};

/// bet <- clamp(bet - (2 / (2 - ln 3)) * grad / (1 + sum grad^2), lo, hi),
/// where the sum includes `grad`.
double ons_step(OnsAccumulator& acc, double grad, double lo, double hi);

enum class Side { kLower, kUpper };

/// Samples and bets of the two wealth processes
///   W-(beta) = prod (1 + nu_m (1 - g(A_m; beta)))            (lower bound on beta_1)
///   W+(beta) = prod (1 + v_m (g(A_m; beta) - 1/kappa_inf))   (upper bound on beta_kappa)
struct BettingState {
  std::vector<double> actions;
  std::vector<double> fhat_values;
  std::vector<double> lower_bets;
  std::vector<double> upper_bets;
  OnsAccumulator ons_lower;
  OnsAccumulator ons_upper;
  double lower_cap = 0.0;  // 1 / (2 tau)
  double upper_cap = 0.0;  // kappa_inf / 2
  double lower = 0.0;      // L_n
  double upper = 0.0;      // U_n
  double log_wealth_at_lower = 0.0;  // log W-(L_n)
  double log_wealth_at_upper = 0.0;  // log W+(U_n)

  /// Initial bets 1/(4 tau) and kappa_inf/4; bounds at [beta_min, beta_max].
  static BettingState start(const GFunction& gf, double kappa_inf);

  std::size_t size() const { return actions.size(); }
};

double log_wealth(const BettingState& state, const GFunction& gf, double beta, Side side,
                  double kappa_inf);
double wealth_eval(const BettingState& state, const GFunction& gf, double beta, Side side,
                   double kappa_inf);

/// Locates the edge of the region {margin >= 0} between `inside` (margin >= 0)
/// and `outside` (margin < 0), which may lie on either side of each other.
/// Uses a bracketed Illinois iteration and stops once the bracket is at most
/// `tol` wide; returns the bracket end that still has margin >= 0.
double refine_boundary(const std::function<double(double)>& margin, double inside,
                       double outside, double tol);

struct CsBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Records the fresh sample `action` with the current bets, re-extracts
/// L_n = sup{beta : W-(beta) >= 2/delta} and U_n = inf{beta : W+(beta) >= 2/delta}
/// (kept monotone in n), then advances both ONS bettors.
CsBounds betting_update(BettingState& state, const GFunction& gf, double action,
                        double kappa_inf, double delta);

struct CsTraceRow {
  std::int64_t n = 0;
  double lower = 0.0;
  double upper = 0.0;
  double lower_bet = 0.0;
  double upper_bet = 0.0;
};

using CsTrace = std::function<void(const CsTraceRow&)>;

struct NormCsResult {
  double beta = 0.0;
  std::int64_t n_used = 0;  // betting samples plus backstop samples, if any
  std::int64_t n_betting = 0;
  bool used_backstop = false;
};

/// Runs the betting sequence for at most n_max samples and returns L_n at the
/// first n with L_n > U_n; otherwise falls back to backstop_beta.
NormCsResult normalization_cs(const GFunction& gf, double delta, double kappa_inf,
                              std::int64_t n_max, const ActionSpace& space, Rng& rng,
                              const CsTrace& trace = {});

}  // namespace cigw
