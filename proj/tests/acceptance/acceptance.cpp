// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "cappedigw/harness.hpp"
#include "cappedigw/normcs.hpp"
#include "cappedigw/offline.hpp"
#include "cappedigw/policy.hpp"
#include "cappedigw/regression.hpp"
#include "cappedigw/stats.hpp"

namespace {

using namespace cigw;

// --- pinned tolerances --------------------------------------------------------

constexpr double kDelta = 0.025;

// C1
constexpr double kBackstopRelTol = 0.05;
constexpr double kBackstopMaxSeconds = 1.0;
// C2
constexpr double kNormCsUpperCi[3] = {96, 908, 11152};
constexpr double kNormCsKappa = 24.0;
constexpr int kNormCsSeeds = 30;
constexpr double kNormCsMaxSeconds = 60.0;
// C3
constexpr int kValidityRuns = 400;
constexpr double kValidityMaxMissRate = 0.05;
constexpr double kValidityMaxSeconds = 120.0;
// C4
constexpr int kSamplerDraws = 100000;
constexpr double kSamplerMaxKs = 0.01;
constexpr double kSamplerMeanDraws = 2.0;
constexpr double kSamplerDrawsTol = 0.05;
constexpr double kSamplerMaxSeconds = 30.0;
// C5
constexpr int kDensityInstances = 50;
constexpr int kDensityOracleQuad = 1000000;
constexpr double kDensityTol = 1e-6;
// C6
constexpr int kSmoothDraws = 100000;
constexpr double kSmoothGreedy = 2.0 / 3.0;
constexpr double kSmoothGreedyTol = 0.01;
constexpr double kSmoothMaxKs = 0.01;
// C7
constexpr std::size_t kRegretHorizon = 20000;
constexpr double kRegretTau = 16.0;
constexpr int kRegretSeeds = 10;
constexpr double kVsUniform = 0.9;
constexpr double kParityTol = 0.05;
constexpr double kRegretGrowth = 1.9;
// C8
constexpr double kGreedyTau = 2.0;
constexpr double kGreedyKappa = 4.0;
constexpr double kGreedySweep[] = {1, 4, 16, 64, 256};
constexpr std::size_t kGreedySweepRounds = 20000;
constexpr std::size_t kGreedyByRound = 1000;
constexpr std::size_t kGreedyWindow = 100;
constexpr double kGreedyFloor = 0.5;
// C9
constexpr std::size_t kOfflineHorizon = 3000;
constexpr int kOfflineSeeds = 30;
constexpr double kOfflineWinRate = 0.60;
constexpr double kIpsSe = 2.0;
constexpr double kIpsSeedCoverage = 0.85;
// C10
constexpr double kSensitivityKappas[] = {2, 4, 24};
constexpr int kSensitivitySeeds = 10;
constexpr std::size_t kSensitivityHorizon = 5000;
constexpr double kSensitivityPvSpread = 0.02;
// C11
constexpr int kGradPoints = 100;
constexpr double kGradRelTol = 1e-4;

// --- helpers -------------------------------------------------------------------

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double ks_distance(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

GFunction needle_g(double tau, double gamma) {
  return {[tau](double a) { return needle_loss(a, tau); }, gamma, tau};
}

// z for the needle with needle width 1/(2 tau), written out directly.
double needle_z(double tau, double gamma, double beta) {
  const auto g = [&](double f) { return f > beta ? tau / (1 + gamma * (f - beta)) : tau; };
  const double w = 1.0 / (2.0 * tau);
  return w * g(0.0) + (1 - w) * g(1.0);
}

// --- criteria ------------------------------------------------------------------

Outcome backstop_counts() {
  const auto t0 = std::chrono::steady_clock::now();
  const double taus[] = {2, 20, 200};
  const double gammas[] = {16, 304, 6368};
  const double published[] = {942, 13496, 177141};
  bool ok = true;
  std::string got;
  for (int i = 0; i < 3; ++i) {
    const auto n = backstop_sample_count(taus[i], gammas[i], kDelta);
    ok = ok && std::abs(static_cast<double>(n) - published[i]) <= kBackstopRelTol * published[i];
    got += fmt("%s%lld", i ? "/" : "", static_cast<long long>(n));
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < kBackstopMaxSeconds;
  return {ok, fmt("n_fixed %s vs 942/13496/177141 within %.0f%%, %.3fs", got.c_str(),
                  100 * kBackstopRelTol, secs)};
}

Outcome normcs_counts() {
  const auto t0 = std::chrono::steady_clock::now();
  const double taus[] = {2, 20, 200};
  const double gammas[] = {16, 304, 6368};
  const auto space = ActionSpace::unit_interval();
  bool ok = true;
  std::string got;
  double kmin = 1e300;
  double kmax = 0.0;
  for (int row = 0; row < 3; ++row) {
    const auto gf = needle_g(taus[row], gammas[row]);
    const auto n_max = backstop_sample_count(taus[row], gammas[row], kDelta);
    std::vector<double> n;
    for (int seed = 0; seed < kNormCsSeeds; ++seed) {
      Rng rng(derive_seed(static_cast<std::uint64_t>(seed), Stream::kPolicy, 0));
      const auto r = normalization_cs(gf, kDelta, kNormCsKappa, n_max, space, rng);
      n.push_back(static_cast<double>(r.n_used));
      const double k = 1.0 / needle_z(taus[row], gammas[row], r.beta);
      kmin = std::min(kmin, k);
      kmax = std::max(kmax, k);
    }
    const auto ci = bootstrap_ci(n, 0.95, 10000, 0);
    ok = ok && ci.hi <= kNormCsUpperCi[row];
    got += fmt("%s%.1f [%.1f, %.1f]", row ? "; " : "", mean(n), ci.lo, ci.hi);
  }
  ok = ok && kmin >= 1.0 - 1e-12 && kmax <= kNormCsKappa + 1e-12;
  const double secs = seconds_since(t0);
  ok = ok && secs < kNormCsMaxSeconds;
  return {ok, fmt("mean [95%% CI] %s; upper ends <= 96/908/11152; kappa_t in [%.3f, %.3f]; %.1fs",
                  got.c_str(), kmin, kmax, secs)};
}

Outcome cs_validity() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto gf = needle_g(2, 16);
  const auto space = ActionSpace::unit_interval();
  const auto n_max = backstop_sample_count(2, 16, kDelta);
  int misses = 0;
  for (int seed = 0; seed < kValidityRuns; ++seed) {
    Rng rng(derive_seed(static_cast<std::uint64_t>(seed), Stream::kPolicy, 1));
    const auto r = normalization_cs(gf, kDelta, kNormCsKappa, n_max, space, rng);
    const double z = needle_z(2, 16, r.beta);
    if (z < 1.0 / kNormCsKappa || z > 1.0) ++misses;
  }
  const double rate = static_cast<double>(misses) / kValidityRuns;
  const double secs = seconds_since(t0);
  return {rate <= kValidityMaxMissRate && secs < kValidityMaxSeconds,
          fmt("%d/%d runs outside [1/24, 1] (rate %.4f <= %.2f), %.1fs", misses, kValidityRuns,
              rate, kValidityMaxMissRate, secs)};
}

Outcome sampler_law() {
  const auto t0 = std::chrono::steady_clock::now();
  const CappedPolicy policy{needle_g(2, 16), 0.875};
  const double kappa = 1.0 / needle_z(2, 16, 0.875);
  // Piecewise-constant density kappa * g.
  const double lo_density = kappa * 2.0;
  const double hi_density = kappa * 2.0 / 3.0;
  const auto cdf = [&](double a) {
    return a <= 0.25 ? lo_density * a : lo_density * 0.25 + hi_density * (a - 0.25);
  };
  const auto space = ActionSpace::unit_interval();
  Rng rng(derive_seed(4, Stream::kPolicy, 0));
  std::vector<double> xs(kSamplerDraws);
  double draws = 0.0;
  for (auto& x : xs) {
    const auto d = rejection_sample(policy, space, rng);
    x = d.action;
    draws += static_cast<double>(d.draws);
  }
  const double ks = ks_distance(xs, cdf);
  const double md = draws / kSamplerDraws;
  const double secs = seconds_since(t0);
  return {ks <= kSamplerMaxKs && std::abs(md - kSamplerMeanDraws) <= kSamplerDrawsTol &&
              secs < kSamplerMaxSeconds,
          fmt("KS %.5f <= %.2f; mean draws %.4f vs %.1f +- %.2f; %.1fs", ks, kSamplerMaxKs, md,
              kSamplerMeanDraws, kSamplerDrawsTol, secs)};
}

Outcome density_normalization() {
  Rng rng(derive_seed(5, Stream::kPolicy, 0));
  double worst = 0.0;
  for (int i = 0; i < kDensityInstances; ++i) {
    // Breakpoints on a 1/1000 grid keep the z oracle's midpoint rule exact.
    std::vector<double> cuts{0.0, 1.0};
    const auto pieces = 1 + rng.below(8);
    for (std::uint64_t k = 1; k < pieces; ++k) cuts.push_back(static_cast<double>(rng.below(1000)) / 1000);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<double> levels(cuts.size() - 1);
    for (auto& v : levels) v = rng.uniform();
    const auto fhat = [cuts, levels](double a) {
      const auto it = std::upper_bound(cuts.begin(), cuts.end(), a);
      const auto k = std::min<std::size_t>(levels.size() - 1,
                                           static_cast<std::size_t>(it - cuts.begin()) - 1);
      return levels[k];
    };
    const GFunction gf{fhat, 1 + 500 * rng.uniform(), 1 + 50 * rng.uniform()};
    const double beta = gf.beta_min() + rng.uniform() * (gf.beta_max() - gf.beta_min());
    const double kappa = 1.0 / z_oracle(gf, beta, kDensityOracleQuad);
    // Exact integral of kappa * g over the pieces.
    double total = 0.0;
    for (std::size_t k = 0; k < levels.size(); ++k) {
      total += (cuts[k + 1] - cuts[k]) * kappa * gf.of_value(levels[k], beta);
    }
    worst = std::max(worst, std::abs(total - 1.0));
  }
  return {worst <= kDensityTol,
          fmt("max |integral - 1| = %.3g over %d instances (<= %.0e)", worst, kDensityInstances,
              kDensityTol)};
}

Outcome smooth_mixture() {
  const auto policy = make_smooth_policy([](double a) { return needle_loss(a, 2.0); }, 16, 2, 0.0);
  const auto space = ActionSpace::unit_interval();
  Rng rng(derive_seed(6, Stream::kPolicy, 0));
  int greedy = 0;
  std::vector<double> xs;
  for (int i = 0; i < kSmoothDraws; ++i) {
    const auto d = smooth_sample(policy, space, rng);
    if (d.is_greedy) {
      ++greedy;
    } else {
      xs.push_back(d.action);
    }
  }
  // Off-greedy law: M / M(A) with M = 1 on [0, 1/4] and 1/9 elsewhere.
  const double m_total = 0.25 + 0.75 / 9.0;
  const auto cdf = [&](double a) {
    return (a <= 0.25 ? a : 0.25 + (a - 0.25) / 9.0) / m_total;
  };
  const double freq = static_cast<double>(greedy) / kSmoothDraws;
  const double ks = ks_distance(xs, cdf);
  return {std::abs(freq - kSmoothGreedy) <= kSmoothGreedyTol && ks <= kSmoothMaxKs,
          fmt("greedy frequency %.4f vs 0.6667 +- %.2f; conditional KS %.5f <= %.2f", freq,
              kSmoothGreedyTol, ks, kSmoothMaxKs)};
}

OnlineResult linear_run(Algorithm alg, std::size_t horizon, std::uint64_t seed, double tau,
                        double kappa = 4.0, bool regret = false) {
  const auto env = synthetic_env(EnvKind::kLinear, {}, horizon, seed);
  OnlineRunConfig cfg;
  cfg.algorithm = alg;
  cfg.policy.tau = tau;
  cfg.policy.kappa_inf = kappa;
  cfg.policy.seed = seed;
  cfg.track_regret = regret;
  return run_online(*env, cfg);
}

Outcome regret_behavior() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> capped;
  std::vector<double> smooth;
  std::vector<double> uniform;
  double regret_t = 0.0;
  double regret_2t = 0.0;
  for (int s = 0; s < kRegretSeeds; ++s) {
    const auto seed = static_cast<std::uint64_t>(s);
    capped.push_back(linear_run(Algorithm::kCappedIgw, kRegretHorizon, seed, kRegretTau).final_pv_loss());
    smooth.push_back(linear_run(Algorithm::kSmoothIgw, kRegretHorizon, seed, kRegretTau).final_pv_loss());
    uniform.push_back(linear_run(Algorithm::kUniform, kRegretHorizon, seed, kRegretTau).final_pv_loss());
    const auto twice = linear_run(Algorithm::kSmoothIgw, 2 * kRegretHorizon, seed, kRegretTau, 4.0, true);
    regret_t += twice.cumulative_regret[kRegretHorizon - 1];
    regret_2t += twice.cumulative_regret.back();
  }
  const double c = mean(capped);
  const double sm = mean(smooth);
  const double u = mean(uniform);
  const double parity = std::abs(c - sm) / std::min(c, sm);
  const double growth = regret_2t / regret_t;
  const bool ok = c <= kVsUniform * u && parity <= kParityTol && growth < kRegretGrowth;
  return {ok, fmt("pv capped %.4f, smooth %.4f, uniform %.4f; capped/uniform %.3f <= %.1f; "
                  "capped-smooth gap %.1f%% <= %.0f%%; smooth regret(2T)/regret(T) %.3f < %.1f; %.0fs",
                  c, sm, u, c / u, kVsUniform, 100 * parity, 100 * kParityTol, growth,
                  kRegretGrowth, seconds_since(t0))};
}

std::vector<ExhaustRecord> needle_smooth_run(GammaSchedule schedule, double gamma,
                                             std::size_t horizon) {
  const NeedleEnv env(kGreedyTau, horizon);
  OnlineRunConfig cfg;
  cfg.algorithm = Algorithm::kSmoothIgw;
  cfg.policy.tau = kGreedyTau;
  cfg.policy.kappa_inf = kGreedyKappa;
  cfg.policy.gamma = gamma;
  cfg.policy.seed = 8;
  cfg.gamma_schedule = schedule;
  return run_online(env, cfg, std::make_unique<NeedleModel>(kGreedyTau)).exhaust;
}

Outcome greedy_fraction_mechanism() {
  std::vector<double> fractions;
  bool monotone = true;
  std::string got;
  for (double gamma : kGreedySweep) {
    const auto ex = needle_smooth_run(GammaSchedule::kFixed, gamma, kGreedySweepRounds);
    const double f = greedy_fraction(ex, ex.size()).front();
    if (!fractions.empty() && f < fractions.back()) monotone = false;
    fractions.push_back(f);
    got += fmt("%s%.3f", got.empty() ? "" : "/", f);
  }
  const auto grown = needle_smooth_run(GammaSchedule::kGrowing, 1.0, kGreedyByRound);
  const auto windows = greedy_fraction(grown, kGreedyWindow);
  const double at_1000 = windows.back();
  return {monotone && at_1000 > kGreedyFloor,
          fmt("fixed-gamma sweep 1/4/16/64/256 greedy fraction %s (non-decreasing: %s); "
              "growing schedule window ending at round %zu: %.2f > %.1f",
              got.c_str(), monotone ? "yes" : "no", kGreedyByRound, at_1000, kGreedyFloor)};
}

// Expected |y - a| under density 2 on [1/4, 3/4].
double window_truth(double y) {
  const double lo = 0.25;
  const double hi = 0.75;
  if (y < lo) return (lo + hi) / 2 - y;
  if (y > hi) return y - (lo + hi) / 2;
  return ((y - lo) * (y - lo) + (hi - y) * (hi - y)) / (2 * (hi - lo));
}

Outcome offline_direction() {
  const auto t0 = std::chrono::steady_clock::now();
  int wins = 0;
  int covered = 0;
  double pooled_err = 0.0;
  double pooled_var = 0.0;
  for (int s = 0; s < kOfflineSeeds; ++s) {
    const auto seed = static_cast<std::uint64_t>(s);
    const auto env = synthetic_env(EnvKind::kLinear, {}, kOfflineHorizon, seed);
    OfflineConfig oc;
    oc.seed = seed;
    double test[2];
    OnlineResult capped;
    for (int k = 0; k < 2; ++k) {
      OnlineRunConfig cfg;
      cfg.algorithm = k == 0 ? Algorithm::kCappedIgw : Algorithm::kSmoothIgw;
      cfg.policy.tau = kRegretTau;
      cfg.policy.seed = seed;
      auto run = run_online(*env, cfg);
      test[k] = run_offline_best(label_exhaust(run.exhaust, *env), oc).test_loss;
      if (k == 0) capped = std::move(run);
    }
    if (test[0] < test[1]) ++wins;

    std::vector<double> kappa_hat;
    for (const auto& m : capped.metrics) kappa_hat.push_back(m.kappa_hat);
    const auto est = ips_value(
        capped.exhaust,
        [](const Context&, double a) { return a >= 0.25 && a <= 0.75 ? 2.0 : 0.0; }, kappa_hat);
    double truth = 0.0;
    for (std::size_t t = 0; t < env->size(); ++t) truth += window_truth(*env->target(t));
    truth /= static_cast<double>(env->size());
    if (std::abs(est.value - truth) <= kIpsSe * est.std_error) ++covered;
    pooled_err += est.value - truth;
    pooled_var += est.std_error * est.std_error;
  }
  const double win_rate = static_cast<double>(wins) / kOfflineSeeds;
  const double coverage = static_cast<double>(covered) / kOfflineSeeds;
  const double pooled_z = pooled_err / std::sqrt(pooled_var);
  const bool ok =
      win_rate >= kOfflineWinRate && coverage >= kIpsSeedCoverage && std::abs(pooled_z) <= kIpsSe;
  return {ok, fmt("capped exhaust wins %d/%d (%.2f >= %.2f); IPS within 2 SE in %d/%d seeds "
                  "(%.2f >= %.2f), pooled error %.2f SE (<= 2); %.0fs",
                  wins, kOfflineSeeds, win_rate, kOfflineWinRate, covered, kOfflineSeeds,
                  coverage, kIpsSeedCoverage, pooled_z, seconds_since(t0))};
}

Outcome kappa_sensitivity() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto gf = needle_g(2, 16);
  const auto space = ActionSpace::unit_interval();
  const auto n_max = backstop_sample_count(2, 16, kDelta);
  std::vector<double> samples;
  std::vector<double> pv;
  for (double kappa : kSensitivityKappas) {
    std::vector<double> n;
    for (int s = 0; s < kNormCsSeeds; ++s) {
      Rng rng(derive_seed(static_cast<std::uint64_t>(s), Stream::kPolicy, 0));
      n.push_back(static_cast<double>(
          normalization_cs(gf, kDelta, kappa, n_max, space, rng).n_used));
    }
    samples.push_back(mean(n));
    std::vector<double> loss;
    for (int s = 0; s < kSensitivitySeeds; ++s) {
      loss.push_back(linear_run(Algorithm::kCappedIgw, kSensitivityHorizon,
                                static_cast<std::uint64_t>(s), kRegretTau, kappa)
                         .final_pv_loss());
    }
    pv.push_back(mean(loss));
  }
  const bool decreasing = samples[0] > samples[1] && samples[1] > samples[2];
  const double lo = *std::min_element(pv.begin(), pv.end());
  const double hi = *std::max_element(pv.begin(), pv.end());
  const double spread = (hi - lo) / lo;
  return {decreasing && spread < kSensitivityPvSpread,
          fmt("NormCS mean samples %.1f/%.1f/%.1f for kappa_inf 2/4/24 (strictly decreasing: %s); "
              "pv %.4f/%.4f/%.4f, spread %.1f%% < %.0f%%; %.0fs",
              samples[0], samples[1], samples[2], decreasing ? "yes" : "no", pv[0], pv[1], pv[2],
              100 * spread, 100 * kSensitivityPvSpread, seconds_since(t0))};
}

Outcome gradient_check() {
  Rng rng(derive_seed(11, Stream::kPolicy, 0));
  double worst = 0.0;
  int checked = 0;
  const auto rel = [](double a, double n) {
    return std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-3});
  };
  while (checked < kGradPoints) {
    const std::size_t dim = 1 + rng.below(6);
    auto p = init_params(dim, rng.next());
    p.u = rng.uniform() - 0.5;
    p.q = 0.2 + 0.6 * rng.uniform();
    Example ex;
    ex.x.features.resize(dim);
    for (auto& v : ex.x.features) v = rng.uniform();
    ex.action = rng.uniform();
    ex.loss = rng.uniform();
    ex.weight = 0.5 + rng.uniform();
    // Interior: raw prediction strictly inside (0, 1) and away from the kink at z = 0.
    const double head = greedy_action(p, ex.x);
    const double raw = predict(p, ex.x, ex.action);
    if (raw <= 1e-3 || raw >= 1 - 1e-3 || std::abs(head - ex.action) < 1e-3) continue;
    ++checked;
    const std::vector<Example> batch{ex};
    const auto g = loss_gradient(p, batch);
    auto at = [&](const std::function<void(RegressorParams&, double)>& bump, double analytic) {
      const double h = 1e-6;
      auto up = p;
      auto dn = p;
      bump(up, h);
      bump(dn, -h);
      const double fd = (mean_squared_loss(up, batch) - mean_squared_loss(dn, batch)) / (2 * h);
      worst = std::max(worst, rel(analytic, fd));
    };
    at([](RegressorParams& q, double h) { q.u += h; }, g.u);
    for (std::size_t i = 0; i < dim; ++i) {
      at([i](RegressorParams& q, double h) { q.w[i] += h; }, g.w[i]);
    }
    at([](RegressorParams& q, double h) { q.q += h; }, g.q);
    for (int k = 0; k < 3; ++k) {
      at([k](RegressorParams& q, double h) { q.w_plus[k] += h; }, g.w_plus[k]);
      at([k](RegressorParams& q, double h) { q.zeta[k] += h; }, g.zeta[k]);
    }
  }
  return {worst <= kGradRelTol,
          fmt("max relative error %.3g over %d interior points (<= %.0e)", worst, kGradPoints,
              kGradRelTol)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"C1 backstop sample counts", backstop_counts},
      {"C2 NormCS stopping times", normcs_counts},
      {"C3 confidence-sequence validity", cs_validity},
      {"C4 rejection sampler law", sampler_law},
      {"C5 density normalization", density_normalization},
      {"C6 SmoothIGW mixture", smooth_mixture},
      {"C7 online regret behavior", regret_behavior},
      {"C8 greedy-fraction mechanism", greedy_fraction_mechanism},
      {"C9 offline utility and IPS", offline_direction},
      {"C10 kappa_inf sensitivity", kappa_sensitivity},
      {"C11 regressor gradient check", gradient_check},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed,
              std::size(criteria));
  return failed == 0 ? 0 : 1;
}
