#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "cappedigw/cli.hpp"
#include "cappedigw/csv.hpp"
#include "cappedigw/exhaust.hpp"
#include "cappedigw/normcs.hpp"
#include "cappedigw/offline.hpp"
#include "cappedigw/stats.hpp"

namespace cigw::cli {
namespace fs = std::filesystem;
using csv::num;

namespace {

std::ofstream open_output(const fs::path& path, const Options& opts) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "# " << opts.provenance << '\n';
  return out;
}

std::vector<std::uint64_t> seed_list(const Options& opts) {
  if (opts.seeds < 1) throw InvalidConfig("--seeds must be >= 1");
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < opts.seeds; ++i) seeds.push_back(opts.seed_offset + static_cast<std::uint64_t>(i));
  return seeds;
}

std::string source_name(const Options& opts) {
  if (!opts.dataset.empty()) return fs::path(opts.dataset).stem().string();
  return opts.env;
}

std::unique_ptr<Environment> make_env(const Options& opts, std::uint64_t seed) {
  if (!opts.dataset.empty()) {
    auto ds = load_and_scale(opts.dataset, opts.max_rows, seed, opts.has_header);
    ds.name = source_name(opts);
    return std::make_unique<SupervisedEnv>(std::move(ds));
  }
  SyntheticParams params;
  params.dim = opts.dim;
  params.needle_tau = opts.needle_tau;
  if (opts.env == "linear") return synthetic_env(EnvKind::kLinear, params, opts.horizon, seed);
  if (opts.env == "needle") return synthetic_env(EnvKind::kNeedle, params, opts.horizon, seed);
  throw InvalidConfig("unknown --env '" + opts.env + "' (expected linear or needle)");
}

std::unique_ptr<LossModel> make_model(const Options& opts) {
  if (opts.dataset.empty() && opts.env == "needle") {
    return std::make_unique<NeedleModel>(opts.needle_tau);
  }
  return nullptr;
}

OnlineRunConfig online_config(const Options& opts, Algorithm algorithm, std::uint64_t seed) {
  OnlineRunConfig cfg;
  cfg.algorithm = algorithm;
  cfg.policy.tau = opts.taus.empty() ? 16.0 : opts.taus.front();
  cfg.policy.kappa_inf = opts.kappa_inf.value_or(4.0);
  cfg.policy.delta = opts.delta;
  cfg.policy.n_max = opts.n_max;
  cfg.policy.regsq_estimate = opts.regsq.value_or(0.0);
  cfg.policy.gamma = opts.gamma.value_or(100.0);
  cfg.policy.seed = seed;
  cfg.batch_size = opts.batch_size;
  cfg.gamma_schedule = parse_gamma_schedule(opts.gamma_schedule);
  return cfg;
}

fs::path job_dir(const Options& opts, const std::string& root, Algorithm algorithm,
                 std::uint64_t seed) {
  return fs::path(root) / source_name(opts) / std::string(to_string(algorithm)) /
         ("seed_" + std::to_string(seed));
}

std::vector<Algorithm> algorithm_list(const Options& opts) {
  std::vector<Algorithm> out;
  for (const auto& tag : opts.algorithms) out.push_back(parse_algorithm(tag));
  if (out.empty()) throw InvalidConfig("--algorithm needs at least one value");
  return out;
}

struct Histogram {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<std::int64_t> counts;

  Histogram(double lo_, double hi_, std::size_t bins) : lo(lo_), hi(hi_), counts(bins, 0) {}
  void add(double v) {
    const double pos = (v - lo) / (hi - lo) * static_cast<double>(counts.size());
    const auto k = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(counts.size() - 1)));
    ++counts[k];
  }
  void write(std::ostream& out, double kappa) const {
    const double width = (hi - lo) / static_cast<double>(counts.size());
    for (std::size_t k = 0; k < counts.size(); ++k) {
      out << num(kappa) << ',' << num(lo + width * static_cast<double>(k)) << ','
          << num(lo + width * static_cast<double>(k + 1)) << ',' << counts[k] << '\n';
    }
  }
};

double mean_of(const std::vector<double>& v) {
  double total = 0.0;
  for (double x : v) total += x;
  return v.empty() ? 0.0 : total / static_cast<double>(v.size());
}

}  // namespace

std::string provenance_line(const std::string& command, const Options& opts) {
  nlohmann::ordered_json j;
  j["tau"] = opts.taus;
  j["gamma"] = opts.gammas;
  j["kappa_inf"] = opts.kappa_inf ? nlohmann::ordered_json(*opts.kappa_inf) : nullptr;
  j["delta"] = opts.delta;
  j["n_max"] = opts.n_max;
  j["regsq"] = opts.regsq ? nlohmann::ordered_json(*opts.regsq) : nullptr;
  j["seeds"] = opts.seeds;
  j["seed"] = opts.seed_offset;
  j["batch_size"] = opts.batch_size;
  j["dataset"] = opts.dataset;
  j["header"] = opts.has_header;
  j["max_rows"] = opts.max_rows;
  j["env"] = opts.env;
  j["horizon"] = opts.horizon;
  j["dim"] = opts.dim;
  j["needle_tau"] = opts.needle_tau;
  j["gamma_schedule"] = opts.gamma_schedule;
  j["algorithm"] = opts.algorithms;
  j["out"] = opts.out;
  j["exhaust"] = opts.exhaust;
  j["trace_normcs"] = opts.trace_normcs;
  j["weight_cap"] = opts.weight_cap;
  j["window"] = opts.window;
  return "cappedigw " + command + " " + j.dump();
}

GammaSchedule parse_gamma_schedule(const std::string& tag) {
  if (tag == "fixed") return GammaSchedule::kFixed;
  if (tag == "horizon") return GammaSchedule::kHorizon;
  if (tag == "growing") return GammaSchedule::kGrowing;
  throw InvalidConfig("unknown gamma schedule '" + tag + "' (expected fixed, horizon or growing)");
}

void apply_config_file(const std::string& path, const std::vector<std::string>& given,
                       Options& opts) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open config file '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig("config file '" + path + "': " + e.what());
  }
  if (!doc.is_object()) throw InvalidConfig("config file must hold a JSON object");

  const auto explicit_flag = [&](const std::string& name) {
    return std::find(given.begin(), given.end(), name) != given.end();
  };
  for (const auto& [raw_key, value] : doc.items()) {
    std::string key = raw_key;
    std::replace(key.begin(), key.end(), '_', '-');
    if (explicit_flag(key)) continue;
    try {
      if (key == "tau") {
        opts.taus = value.is_array() ? value.get<std::vector<double>>()
                                     : std::vector<double>{value.get<double>()};
      } else if (key == "gamma") {
        if (value.is_array()) {
          opts.gammas = value.get<std::vector<double>>();
        } else {
          opts.gamma = value.get<double>();
          opts.gammas = {*opts.gamma};
        }
      } else if (key == "kappa-inf") {
        opts.kappa_inf = value.get<double>();
      } else if (key == "delta") {
        opts.delta = value.get<double>();
      } else if (key == "n-max") {
        opts.n_max = value.get<std::int64_t>();
      } else if (key == "regsq" || key == "regsq-estimate") {
        opts.regsq = value.get<double>();
      } else if (key == "seeds") {
        opts.seeds = value.get<int>();
      } else if (key == "seed" || key == "seed-offset") {
        opts.seed_offset = value.get<std::uint64_t>();
      } else if (key == "batch-size") {
        opts.batch_size = value.get<std::size_t>();
      } else if (key == "dataset") {
        opts.dataset = value.get<std::string>();
      } else if (key == "header") {
        opts.has_header = value.get<bool>();
      } else if (key == "max-rows") {
        opts.max_rows = value.get<std::size_t>();
      } else if (key == "env") {
        opts.env = value.get<std::string>();
      } else if (key == "horizon") {
        opts.horizon = value.get<std::size_t>();
      } else if (key == "dim") {
        opts.dim = value.get<std::size_t>();
      } else if (key == "needle-tau") {
        opts.needle_tau = value.get<double>();
      } else if (key == "gamma-schedule") {
        opts.gamma_schedule = value.get<std::string>();
      } else if (key == "algorithm") {
        opts.algorithms = value.is_array() ? value.get<std::vector<std::string>>()
                                           : std::vector<std::string>{value.get<std::string>()};
      } else if (key == "out") {
        opts.out = value.get<std::string>();
      } else if (key == "exhaust") {
        opts.exhaust = value.get<std::string>();
      } else if (key == "trace-normcs") {
        opts.trace_normcs = value.get<bool>();
      } else if (key == "weight-cap") {
        opts.weight_cap = value.get<double>();
      } else if (key == "window") {
        opts.window = value.get<std::size_t>();
      } else {
        throw InvalidConfig("config file: unknown key '" + raw_key + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw InvalidConfig("config file: bad value for '" + raw_key + "': " + e.what());
    }
  }
}

void normcs_bench(const Options& opts) {
  std::vector<double> taus = opts.taus;
  std::vector<double> gammas = opts.gammas;
  if (taus.empty() && gammas.empty()) {
    taus = {2.0, 20.0, 200.0};
    gammas = {16.0, 304.0, 6368.0};
  }
  if (taus.size() != gammas.size()) {
    throw InvalidConfig("normcs-bench needs one --gamma per --tau");
  }
  const double kappa = opts.kappa_inf.value_or(24.0);
  const auto seeds = seed_list(opts);
  const auto space = ActionSpace::unit_interval();

  auto out = open_output(fs::path(opts.out) / "normcs_bench.csv", opts);
  out << "tau,gamma,delta,kappa_inf,n_fixed,n_normcs_mean,n_normcs_ci_lo,n_normcs_ci_hi,"
         "kappa_min,kappa_max,backstop_runs\n";
  std::ofstream trace_out;
  if (opts.trace_normcs) {
    trace_out = open_output(fs::path(opts.out) / "normcs_trace.csv", opts);
    trace_out << "tau,gamma,seed,n,lower,upper,lower_bet,upper_bet\n";
  }

  for (std::size_t row = 0; row < taus.size(); ++row) {
    const double tau = taus[row];
    const double gamma = gammas[row];
    GFunction gf{[tau](double a) { return needle_loss(a, tau); }, gamma, tau};
    const std::int64_t n_fixed = backstop_sample_count(tau, gamma, opts.delta);
    const std::int64_t n_max = opts.n_max > 0 ? opts.n_max : n_fixed;

    std::vector<double> samples;
    double kappa_min = std::numeric_limits<double>::infinity();
    double kappa_max = 0.0;
    int backstops = 0;
    for (const auto seed : seeds) {
      Rng rng(derive_seed(seed, Stream::kPolicy, 0));
      CsTrace trace;
      if (opts.trace_normcs) {
        trace = [&](const CsTraceRow& r) {
          trace_out << num(tau) << ',' << num(gamma) << ',' << seed << ',' << r.n << ','
                    << num(r.lower) << ',' << num(r.upper) << ',' << num(r.lower_bet) << ','
                    << num(r.upper_bet) << '\n';
        };
      }
      const auto res = normalization_cs(gf, opts.delta, kappa, n_max, space, rng, trace);
      samples.push_back(static_cast<double>(res.n_used));
      const double k = 1.0 / z_oracle(gf, res.beta);
      kappa_min = std::min(kappa_min, k);
      kappa_max = std::max(kappa_max, k);
      backstops += res.used_backstop ? 1 : 0;
    }
    const Interval ci = samples.size() >= 2 ? bootstrap_ci(samples, 0.95, 10000, 0)
                                            : Interval{samples[0], samples[0]};
    out << num(tau) << ',' << num(gamma) << ',' << num(opts.delta) << ',' << num(kappa) << ','
        << n_fixed << ',' << num(mean_of(samples)) << ',' << num(ci.lo) << ',' << num(ci.hi)
        << ',' << num(kappa_min) << ',' << num(kappa_max) << ',' << backstops << '\n';
  }
}

void online(const Options& opts) {
  const auto algorithms = algorithm_list(opts);
  const auto seeds = seed_list(opts);
  const std::string name = source_name(opts);
  std::vector<std::vector<double>> pv(algorithms.size());

  auto results = open_output(fs::path(opts.out) / name / "results.csv", opts);
  results << "dataset,algorithm,seed,pv_loss\n";
  for (const auto seed : seeds) {
    const auto env = make_env(opts, seed);
    for (std::size_t k = 0; k < algorithms.size(); ++k) {
      auto cfg = online_config(opts, algorithms[k], seed);
      const auto dir = job_dir(opts, opts.out, algorithms[k], seed);
      std::ofstream trace_out;
      std::int64_t round = 0;
      if (opts.trace_normcs && algorithms[k] == Algorithm::kCappedIgw) {
        trace_out = open_output(dir / "normcs_trace.csv", opts);
        trace_out << "round,n,lower,upper,lower_bet,upper_bet\n";
        cfg.trace = [&](const CsTraceRow& r) {
          if (r.n == 1) ++round;
          trace_out << round << ',' << r.n << ',' << num(r.lower) << ',' << num(r.upper) << ','
                    << num(r.lower_bet) << ',' << num(r.upper_bet) << '\n';
        };
      }
      const auto run = run_online(*env, cfg, make_model(opts));

      auto metrics = open_output(dir / "metrics.csv", opts);
      write_metrics_csv(metrics, run.metrics);
      std::ofstream exhaust(dir / "exhaust.jsonl");
      write_exhaust(exhaust, run.exhaust);

      pv[k].push_back(run.final_pv_loss());
      results << name << ',' << to_string(algorithms[k]) << ',' << seed << ','
              << num(run.final_pv_loss()) << '\n';
    }
  }

  if (algorithms.size() >= 2 && seeds.size() >= 2) {
    auto summary = open_output(fs::path(opts.out) / name / "summary.csv", opts);
    write_summary_csv(summary, {summarize(name, pv[0], pv[1])});
  }
}

void offline(const Options& opts) {
  const auto algorithms = algorithm_list(opts);
  const auto seeds = seed_list(opts);
  const std::string name = source_name(opts);
  const std::string in_root = opts.exhaust.empty() ? opts.out : opts.exhaust;
  std::vector<std::vector<double>> test(algorithms.size());

  auto results = open_output(fs::path(opts.out) / name / "offline_results.csv", opts);
  results << "dataset,seed,exhaust_algorithm,method,test_loss\n";
  for (const auto seed : seeds) {
    const auto env = make_env(opts, seed);
    for (std::size_t k = 0; k < algorithms.size(); ++k) {
      const auto path = job_dir(opts, in_root, algorithms[k], seed) / "exhaust.jsonl";
      if (!fs::exists(path)) {
        throw InvalidConfig("missing exhaust " + path.string() + " (run the online command first)");
      }
      const auto rows = label_exhaust(read_exhaust_file(path.string()), *env);
      OfflineConfig cfg;
      cfg.weight_cap = opts.weight_cap;
      cfg.seed = seed;
      const auto outcome = run_offline_best(rows, cfg);
      test[k].push_back(outcome.test_loss);
      results << name << ',' << seed << ',' << to_string(algorithms[k]) << ','
              << to_string(outcome.method) << ',' << num(outcome.test_loss) << '\n';
    }
  }

  if (algorithms.size() >= 2 && seeds.size() >= 2) {
    auto summary = open_output(fs::path(opts.out) / name / "offline_summary.csv", opts);
    write_summary_csv(summary, {summarize(name, test[0], test[1])});
  }
}

void greedy_fraction(const Options& opts) {
  std::vector<ExhaustRecord> exhaust;
  if (!opts.exhaust.empty()) {
    exhaust = read_exhaust_file(opts.exhaust);
  } else {
    const auto seed = opts.seed_offset;
    const auto env = make_env(opts, seed);
    const auto cfg = online_config(opts, Algorithm::kSmoothIgw, seed);
    exhaust = run_online(*env, cfg, make_model(opts)).exhaust;
  }
  const auto series = cigw::greedy_fraction(exhaust, opts.window);

  auto out = open_output(fs::path(opts.out) / "greedy_fraction.csv", opts);
  out << "window,first_round,last_round,fraction\n";
  for (std::size_t w = 0; w < series.size(); ++w) {
    const std::size_t first = w * opts.window;
    const std::size_t last = std::min(first + opts.window, exhaust.size()) - 1;
    out << w << ',' << exhaust[first].round << ',' << exhaust[last].round << ','
        << num(series[w]) << '\n';
  }
}

void sensitivity(const Options& opts) {
  const std::vector<double> kappas{2.0, 4.0, 24.0};
  const auto seeds = seed_list(opts);
  const auto space = ActionSpace::unit_interval();
  const double needle_tau = opts.taus.empty() ? 2.0 : opts.taus.front();
  const double needle_gamma = opts.gamma.value_or(16.0);
  GFunction needle{[needle_tau](double a) { return needle_loss(a, needle_tau); }, needle_gamma,
                   needle_tau};

  auto out = open_output(fs::path(opts.out) / "sensitivity.csv", opts);
  out << "kappa_inf,normcs_samples_mean,pv_loss_mean,offline_test_loss_mean\n";
  auto prop_out = open_output(fs::path(opts.out) / "propensity_hist.csv", opts);
  prop_out << "kappa_inf,bin_lo,bin_hi,count\n";
  auto weight_out = open_output(fs::path(opts.out) / "weight_hist.csv", opts);
  weight_out << "kappa_inf,bin_lo,bin_hi,count\n";

  for (const double kappa : kappas) {
    std::vector<double> samples;
    std::vector<double> pv;
    std::vector<double> test;
    const std::int64_t n_max =
        opts.n_max > 0 ? opts.n_max : backstop_sample_count(needle_tau, needle_gamma, opts.delta);
    for (const auto seed : seeds) {
      Rng rng(derive_seed(seed, Stream::kPolicy, 0));
      samples.push_back(static_cast<double>(
          normalization_cs(needle, opts.delta, kappa, n_max, space, rng).n_used));
    }

    Options run_opts = opts;
    run_opts.kappa_inf = kappa;
    const double tau = run_opts.taus.empty() ? 16.0 : run_opts.taus.front();
    Histogram props(0.0, tau, 20);
    Histogram weights(0.0, opts.weight_cap, 20);
    for (const auto seed : seeds) {
      const auto env = make_env(run_opts, seed);
      const auto run = run_online(*env, online_config(run_opts, Algorithm::kCappedIgw, seed),
                                  make_model(run_opts));
      pv.push_back(run.final_pv_loss());
      for (const auto& r : run.exhaust) {
        props.add(r.propensity);
        weights.add(importance_weight(r, opts.weight_cap));
      }
      if (env->target(0)) {
        OfflineConfig cfg;
        cfg.weight_cap = opts.weight_cap;
        cfg.seed = seed;
        test.push_back(run_offline_best(label_exhaust(run.exhaust, *env), cfg).test_loss);
      }
    }
    out << num(kappa) << ',' << num(mean_of(samples)) << ',' << num(mean_of(pv)) << ','
        << (test.empty() ? std::string("nan") : num(mean_of(test))) << '\n';
    props.write(prop_out, kappa);
    weights.write(weight_out, kappa);
  }
}

}  // namespace cigw::cli
