#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cappedigw/core.hpp"
#include "cappedigw/exhaust.hpp"
#include "cappedigw/harness.hpp"
#include "cappedigw/normcs.hpp"
#include "cappedigw/policy.hpp"
#include "cappedigw/stats.hpp"

namespace py = pybind11;
using namespace cigw;

namespace {

EnvKind parse_env(const std::string& name) {
  if (name == "linear") return EnvKind::kLinear;
  if (name == "needle") return EnvKind::kNeedle;
  throw InvalidConfig("unknown environment '" + name + "' (expected linear or needle)");
}

GammaSchedule parse_schedule(const std::string& name) {
  if (name == "fixed") return GammaSchedule::kFixed;
  if (name == "horizon") return GammaSchedule::kHorizon;
  if (name == "growing") return GammaSchedule::kGrowing;
  throw InvalidConfig("unknown gamma schedule '" + name + "'");
}

// Python callables are invoked with the GIL held; the loops below never release it.
py::dict run_online_py(const std::string& env_name, std::size_t horizon,
                       const std::string& algorithm, double tau, double kappa_inf,
                       double gamma, const std::string& gamma_schedule, std::uint64_t seed,
                       std::size_t batch_size) {
  const auto kind = parse_env(env_name);
  SyntheticParams params;
  params.needle_tau = tau;
  const auto env = synthetic_env(kind, params, horizon, seed);
  OnlineRunConfig cfg;
  cfg.algorithm = parse_algorithm(algorithm);
  cfg.policy.tau = tau;
  cfg.policy.kappa_inf = kappa_inf;
  cfg.policy.gamma = gamma;
  cfg.policy.seed = seed;
  cfg.gamma_schedule = parse_schedule(gamma_schedule);
  cfg.batch_size = batch_size;
  cfg.track_regret = true;
  std::unique_ptr<LossModel> model;
  if (kind == EnvKind::kNeedle) model = std::make_unique<NeedleModel>(tau);
  const auto res = run_online(*env, cfg, std::move(model));

  py::dict out;
  std::vector<double> loss, pv, beta, kappa_hat;
  std::vector<std::int64_t> samples;
  for (const auto& m : res.metrics) {
    loss.push_back(m.loss);
    pv.push_back(m.pv_loss);
    beta.push_back(m.beta);
    kappa_hat.push_back(m.kappa_hat);
    samples.push_back(m.normcs_samples);
  }
  out["loss"] = loss;
  out["pv_loss"] = pv;
  out["beta"] = beta;
  out["kappa_hat"] = kappa_hat;
  out["normcs_samples"] = samples;
  out["cumulative_regret"] = res.cumulative_regret;
  std::vector<std::string> exhaust;
  for (const auto& r : res.exhaust) exhaust.push_back(encode_exhaust(r));
  out["exhaust"] = exhaust;
  return out;
}

}  // namespace

PYBIND11_MODULE(_cappedigw, m) {
  m.doc() = "Capped inverse-gap-weighted exploration for continuous-action bandits";

  py::register_exception<InvalidConfig>(m, "InvalidConfig", PyExc_ValueError);
  py::register_exception<SamplerBreaker>(m, "SamplerBreaker", PyExc_RuntimeError);

  m.def("exploration_gamma", &exploration_gamma, py::arg("horizon"), py::arg("kappa_inf"),
        py::arg("tau"), py::arg("regsq"));
  m.def("smooth_benchmark", &smooth_benchmark, py::arg("mean_loss"), py::arg("tau"),
        py::arg("resolution") = 10000);
  m.def("backstop_sample_count", &backstop_sample_count, py::arg("tau"), py::arg("gamma"),
        py::arg("delta"));
  m.def("needle_loss", &needle_loss, py::arg("action"), py::arg("needle_tau"));

  m.def(
      "z_oracle",
      [](std::function<double(double)> fhat, double tau, double gamma, double beta, int n_quad) {
        return z_oracle(GFunction{std::move(fhat), gamma, tau}, beta, n_quad);
      },
      py::arg("fhat"), py::arg("tau"), py::arg("gamma"), py::arg("beta"),
      py::arg("n_quad") = 100000);

  py::class_<NormCsResult>(m, "NormCsResult")
      .def_readonly("beta", &NormCsResult::beta)
      .def_readonly("n_used", &NormCsResult::n_used)
      .def_readonly("n_betting", &NormCsResult::n_betting)
      .def_readonly("used_backstop", &NormCsResult::used_backstop)
      .def("__repr__", [](const NormCsResult& r) {
        return "NormCsResult(beta=" + std::to_string(r.beta) +
               ", n_used=" + std::to_string(r.n_used) + ")";
      });

  m.def(
      "normalization_cs",
      [](std::function<double(double)> fhat, double tau, double gamma, double kappa_inf,
         double delta, std::int64_t n_max, std::uint64_t seed) {
        const GFunction gf{std::move(fhat), gamma, tau};
        if (n_max <= 0) n_max = backstop_sample_count(tau, gamma, delta);
        Rng rng(seed);
        return normalization_cs(gf, delta, kappa_inf, n_max, ActionSpace::unit_interval(), rng);
      },
      py::arg("fhat"), py::arg("tau"), py::arg("gamma"), py::arg("kappa_inf") = 4.0,
      py::arg("delta") = 0.025, py::arg("n_max") = 0, py::arg("seed") = 0);

  m.def(
      "rejection_sample",
      [](std::function<double(double)> fhat, double tau, double gamma, double beta,
         std::size_t count, std::uint64_t seed) {
        const CappedPolicy policy{GFunction{std::move(fhat), gamma, tau}, beta};
        const auto space = ActionSpace::unit_interval();
        Rng rng(seed);
        std::vector<double> actions;
        std::vector<std::int64_t> draws;
        for (std::size_t i = 0; i < count; ++i) {
          const auto d = rejection_sample(policy, space, rng);
          actions.push_back(d.action);
          draws.push_back(d.draws);
        }
        return py::make_tuple(actions, draws);
      },
      py::arg("fhat"), py::arg("tau"), py::arg("gamma"), py::arg("beta"), py::arg("count"),
      py::arg("seed") = 0, "Returns (actions, draws per action).");

  m.def(
      "smooth_sample",
      [](std::function<double(double)> fhat, double tau, double gamma, double greedy,
         std::size_t count, std::uint64_t seed) {
        const auto policy = make_smooth_policy(std::move(fhat), gamma, tau, greedy);
        const auto space = ActionSpace::unit_interval();
        Rng rng(seed);
        std::vector<double> actions;
        std::vector<bool> greedy_flags;
        for (std::size_t i = 0; i < count; ++i) {
          const auto d = smooth_sample(policy, space, rng);
          actions.push_back(d.action);
          greedy_flags.push_back(d.is_greedy);
        }
        return py::make_tuple(actions, greedy_flags);
      },
      py::arg("fhat"), py::arg("tau"), py::arg("gamma"), py::arg("greedy"), py::arg("count"),
      py::arg("seed") = 0, "Returns (actions, is_greedy flags).");

  m.def("run_online", &run_online_py, py::arg("env") = "linear", py::arg("horizon") = 1000,
        py::arg("algorithm") = "capped_igw", py::arg("tau") = 16.0, py::arg("kappa_inf") = 4.0,
        py::arg("gamma") = 100.0, py::arg("gamma_schedule") = "horizon", py::arg("seed") = 0,
        py::arg("batch_size") = 8,
        "Runs one online job and returns per-round series plus JSON exhaust lines.");

  m.def(
      "bootstrap_ci",
      [](const std::vector<double>& values, double level, int resamples, std::uint64_t seed) {
        const auto ci = bootstrap_ci(values, level, resamples, seed);
        return py::make_tuple(ci.lo, ci.hi);
      },
      py::arg("values"), py::arg("level") = 0.90, py::arg("resamples") = 10000,
      py::arg("seed") = 0);
}
