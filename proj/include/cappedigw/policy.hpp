#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>

#include "cappedigw/core.hpp"
#include "cappedigw/normcs.hpp"
#include "cappedigw/regression.hpp"
#include "cappedigw/rng.hpp"

namespace cigw {

/// Raised when the rejection sampler exceeds its draw budget, which can only
/// happen when beta does not keep the normalizer below kappa_inf.
class SamplerBreaker : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::int64_t kMaxRejectionDraws = 1'000'000;

/// Per-round CappedIGW distribution: density kappa_t * g(a; beta) against mu.
struct CappedPolicy {
  GFunction gf;
  double beta = 0.0;
};

/// Logged propensity g(a; beta), i.e. the density with the normalizer taken as 1.
double capped_propensity(const CappedPolicy& policy, double action);

struct RejectionDraw {
  double action = 0.0;
  std::int64_t draws = 0;
};

/// Draws a ~ mu and accepts with probability g(a; beta) / tau until one is
/// accepted. The draw count is geometric with mean kappa_t * tau.
RejectionDraw rejection_sample(const CappedPolicy& policy, const ActionSpace& space, Rng& rng,
                               std::int64_t max_draws = kMaxRejectionDraws);

/// SmoothIGW: sub-probability measure M with dM/dmu(a) = tau / (tau + gamma (fhat(a) - fhat(greedy)))
/// plus the leftover mass 1 - M(A) on the greedy action.
struct SmoothPolicy {
  std::function<double(double)> fhat;
  double gamma = 1.0;
  double tau = 1.0;
  double greedy = 0.0;
  double greedy_loss = 0.0;
  // False when `greedy` came from a grid search rather than a certified
  // minimizer; negative gaps are then clipped instead of rejected.
  bool exact_greedy = true;
};

SmoothPolicy make_smooth_policy(std::function<double(double)> fhat, double gamma, double tau,
                                double greedy, bool exact_greedy = true);

/// Throws std::logic_error if fhat(a) lies more than 1e-9 below fhat(greedy)
/// for a certified greedy action.
double smooth_m_density(const SmoothPolicy& policy, double action);

/// M(A) by midpoint quadrature on the unit interval.
double smooth_total_mass(const SmoothPolicy& policy, int n_quad = 10000);

struct SmoothDraw {
  double action = 0.0;
  bool is_greedy = false;
  double density = 0.0;  // dM/dmu(action); 0 for greedy draws
};

/// One base draw a ~ mu, kept with probability dM/dmu(a), otherwise replaced
/// by the greedy action. This samples exactly from M + (1 - M(A)) * point mass.
SmoothDraw smooth_sample(const SmoothPolicy& policy, const ActionSpace& space, Rng& rng);

/// Everything a round reports back to the harness before the loss is seen.
struct RoundOutcome {
  double action = 0.0;
  double propensity = 0.0;
  bool is_greedy = false;
  double beta = 0.0;
  std::int64_t normcs_samples = 0;
  std::int64_t rejection_draws = 0;
  bool used_backstop = false;
  double greedy_mass = 0.0;
  double kappa_hat = 1.0;
};

/// Base draws used to estimate 1/kappa_t alongside each CappedIGW round.
inline constexpr int kNormalizerProbeDraws = 32;

/// n_max for the round: cfg.n_max when positive, else the backstop sample count.
std::int64_t effective_n_max(const PolicyConfig& cfg);

/// Freezes fhat(x, .), computes beta with the normalization CS, then
/// rejection-samples the action. The model update is the caller's job.
RoundOutcome capped_round(const LossModel& model, const Context& x, const PolicyConfig& cfg,
                          Rng& rng, const CsTrace& trace = {});

/// Greedy action from the model's certified argmin, or a 1000-point grid
/// search when it has none; samples from the SmoothIGW mixture.
RoundOutcome smooth_round(const LossModel& model, const Context& x, const PolicyConfig& cfg,
                          Rng& rng);

/// Uniform-random baseline: a ~ mu with propensity 1.
RoundOutcome uniform_round(Rng& rng);

}  // namespace cigw
