#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cappedigw/cli.hpp"
#include "cappedigw/core.hpp"

namespace {

void add_common(CLI::App& cmd, cigw::cli::Options& o, std::string& config) {
  cmd.add_option("--tau", o.taus, "Smoothness level(s)");
  cmd.add_option("--gamma", o.gammas, "Exploration parameter(s); a single value fixes gamma")
      ->each([&o](const std::string& v) { o.gamma = std::stod(v); });
  cmd.add_option("--kappa-inf", o.kappa_inf, "Normalization slack kappa_inf");
  cmd.add_option("--delta", o.delta, "Per-call NormCS failure probability");
  cmd.add_option("--n-max", o.n_max, "Betting-sequence sample cap (0: backstop count)");
  cmd.add_option("--regsq", o.regsq, "RegSq(T) stand-in (default log T)");
  cmd.add_option("--seeds", o.seeds, "Number of seeds");
  cmd.add_option("--seed", o.seed_offset, "First seed");
  cmd.add_option("--batch-size", o.batch_size, "Contexts per oracle update");
  cmd.add_option("--dataset", o.dataset, "CSV file, last column is the target");
  cmd.add_flag("--header", o.has_header, "The CSV has a header row");
  cmd.add_option("--max-rows", o.max_rows, "Rows kept after shuffling");
  cmd.add_option("--env", o.env, "Synthetic environment: linear or needle");
  cmd.add_option("--horizon", o.horizon, "Rounds for synthetic environments");
  cmd.add_option("--dim", o.dim, "Context dimension of the linear environment");
  cmd.add_option("--needle-tau", o.needle_tau, "Needle width parameter");
  cmd.add_option("--gamma-schedule", o.gamma_schedule, "fixed, horizon or growing");
  cmd.add_option("--algorithm", o.algorithms, "capped_igw, smooth_igw, uniform");
  cmd.add_option("--out", o.out, "Output directory");
  cmd.add_option("--exhaust", o.exhaust, "Exhaust file (greedy-fraction) or directory (offline)");
  cmd.add_flag("--trace-normcs", o.trace_normcs, "Write per-sample NormCS traces");
  cmd.add_option("--weight-cap", o.weight_cap, "Importance-weight cap");
  cmd.add_option("--window", o.window, "Greedy-fraction window");
  cmd.add_option("--config", config, "JSON config; flags take precedence");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CappedIGW contextual bandits: NormCS benchmarks, online and offline experiments"};
  app.require_subcommand(1);

  cigw::cli::Options opts;
  std::string config;
  struct Command {
    std::string name;
    std::string help;
    void (*run)(const cigw::cli::Options&);
  };
  const std::vector<Command> commands{
      {"normcs-bench", "NormCS stopping times on the needle loss", cigw::cli::normcs_bench},
      {"online", "Online runs; writes metrics, exhaust and summaries", cigw::cli::online},
      {"offline", "Offline learning from online exhaust", cigw::cli::offline},
      {"greedy-fraction", "Windowed greedy fraction of SmoothIGW exhaust", cigw::cli::greedy_fraction},
      {"sensitivity", "kappa_inf sweep with propensity and weight histograms", cigw::cli::sensitivity},
  };
  std::vector<CLI::App*> subs;
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    add_common(*sub, opts, config);
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    for (std::size_t i = 0; i < subs.size(); ++i) {
      auto* sub = subs[i];
      if (!sub->parsed()) continue;
      if (!config.empty()) {
        std::vector<std::string> given;
        for (const auto* opt : sub->get_options()) {
          if (opt->count() > 0) given.push_back(opt->get_name(false, true).substr(2));
        }
        cigw::cli::apply_config_file(config, given, opts);
      }
      opts.provenance = cigw::cli::provenance_line(commands[i].name, opts);
      commands[i].run(opts);
    }
  } catch (const cigw::InvalidConfig& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
