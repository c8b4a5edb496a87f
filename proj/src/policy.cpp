#include "cappedigw/policy.hpp"

#include <algorithm>
#include <string>

namespace cigw {

double capped_propensity(const CappedPolicy& policy, double action) {
  return g_eval(policy.gf, action, policy.beta);
}

RejectionDraw rejection_sample(const CappedPolicy& policy, const ActionSpace& space, Rng& rng,
                               std::int64_t max_draws) {
  for (std::int64_t draws = 1; draws <= max_draws; ++draws) {
    const double a = space.sample(rng);
    const double accept = policy.gf(a, policy.beta) / policy.gf.tau;
    if (rng.uniform() < accept) return {a, draws};
  }
  throw SamplerBreaker("rejection sampler exceeded " + std::to_string(max_draws) +
                       " draws; beta = " + std::to_string(policy.beta) +
                       " does not bound the normalizer");
}

SmoothPolicy make_smooth_policy(std::function<double(double)> fhat, double gamma, double tau,
                                double greedy, bool exact_greedy) {
  SmoothPolicy p;
  p.greedy_loss = fhat(greedy);
  p.fhat = std::move(fhat);
  p.gamma = gamma;
  p.tau = tau;
  p.greedy = greedy;
  p.exact_greedy = exact_greedy;
  return p;
}

double smooth_m_density(const SmoothPolicy& policy, double action) {
  double gap = policy.fhat(action) - policy.greedy_loss;
  if (gap < -1e-9) {
    if (policy.exact_greedy) {
      throw std::logic_error("smooth_m_density: greedy action is not a minimizer of fhat");
    }
    gap = 0.0;
  }
  gap = std::max(gap, 0.0);
  return policy.tau / (policy.tau + policy.gamma * gap);
}

double smooth_total_mass(const SmoothPolicy& policy, int n_quad) {
  double total = 0.0;
  for (int i = 0; i < n_quad; ++i) {
    total += smooth_m_density(policy, (static_cast<double>(i) + 0.5) / static_cast<double>(n_quad));
  }
  return total / static_cast<double>(n_quad);
}

SmoothDraw smooth_sample(const SmoothPolicy& policy, const ActionSpace& space, Rng& rng) {
  const double a = space.sample(rng);
  const double density = smooth_m_density(policy, a);
  if (rng.uniform() < density) return {a, false, density};
  return {policy.greedy, true, 0.0};
}

std::int64_t effective_n_max(const PolicyConfig& cfg) {
  return cfg.n_max > 0 ? cfg.n_max : backstop_sample_count(cfg.tau, cfg.gamma, cfg.delta);
}

RoundOutcome capped_round(const LossModel& model, const Context& x, const PolicyConfig& cfg,
                          Rng& rng, const CsTrace& trace) {
  const auto space = ActionSpace::unit_interval();
  CappedPolicy policy{GFunction{model.frozen(x), cfg.gamma, cfg.tau}, 0.0};

  Rng cs_rng = rng.split();
  Rng sample_rng = rng.split();
  Rng probe_rng = rng.split();

  const auto cs =
      normalization_cs(policy.gf, cfg.delta, cfg.kappa_inf, effective_n_max(cfg), space, cs_rng,
                       trace);
  policy.beta = cs.beta;
  const auto draw = rejection_sample(policy, space, sample_rng);

  // Independent draws give an unbiased estimate of 1/kappa_t = E_mu[g].
  double z_hat = 0.0;
  for (int i = 0; i < kNormalizerProbeDraws; ++i) {
    z_hat += policy.gf(space.sample(probe_rng), policy.beta);
  }
  z_hat /= kNormalizerProbeDraws;

  RoundOutcome out;
  out.action = draw.action;
  out.propensity = capped_propensity(policy, draw.action);
  out.beta = cs.beta;
  out.normcs_samples = cs.n_used;
  out.rejection_draws = draw.draws;
  out.used_backstop = cs.used_backstop;
  out.kappa_hat = 1.0 / z_hat;
  return out;
}

RoundOutcome smooth_round(const LossModel& model, const Context& x, const PolicyConfig& cfg,
                          Rng& rng) {
  const auto space = ActionSpace::unit_interval();
  auto fhat = model.frozen(x);
  const auto exact = model.exact_argmin(x);
  const double greedy = exact ? *exact : grid_argmin(fhat, 1000);
  const auto policy = make_smooth_policy(std::move(fhat), cfg.gamma, cfg.tau, greedy,
                                         exact.has_value());

  Rng sample_rng = rng.split();
  const auto draw = smooth_sample(policy, space, sample_rng);

  RoundOutcome out;
  out.action = draw.action;
  out.is_greedy = draw.is_greedy;
  out.propensity = draw.density;
  out.beta = policy.greedy_loss;
  out.greedy_mass = 1.0 - smooth_total_mass(policy);
  out.rejection_draws = 1;
  return out;
}

RoundOutcome uniform_round(Rng& rng) {
  RoundOutcome out;
  Rng sample_rng = rng.split();
  out.action = ActionSpace::unit_interval().sample(sample_rng);
  out.propensity = 1.0;
  out.rejection_draws = 1;
  return out;
}

}  // namespace cigw
