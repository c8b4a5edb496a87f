#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cappedigw/core.hpp"
#include "cappedigw/harness.hpp"

namespace cigw::cli {

/// Everything the subcommands read. Unset optionals fall back to per-command defaults.
struct Options {
  std::vector<double> taus;    // empty: command default
  std::vector<double> gammas;  // paired with taus for normcs-bench
  std::optional<double> kappa_inf;
  double delta = 0.025;
  std::int64_t n_max = 0;
  std::optional<double> regsq;
  int seeds = 30;
  std::uint64_t seed_offset = 0;
  std::size_t batch_size = 8;
  std::string dataset;  // CSV path; empty selects --env
  bool has_header = false;
  std::size_t max_rows = 80000;
  std::string env = "linear";
  std::size_t horizon = 20000;
  std::size_t dim = 5;
  double needle_tau = 2.0;
  std::string gamma_schedule = "horizon";
  std::optional<double> gamma;  // used by the fixed schedule
  // Paired summaries report Loss(first) - Loss(second).
  std::vector<std::string> algorithms{"smooth_igw", "capped_igw"};
  std::string out = "out";
  std::string exhaust;  // greedy-fraction input; offline input directory
  bool trace_normcs = false;
  double weight_cap = 5.0;
  std::size_t window = 100;
  std::string provenance;  // written as the first comment line of every CSV
};

/// Reads a JSON object whose keys match the flag names (underscores or dashes)
/// and fills every field whose flag was not given on the command line.
/// `given` lists the long flag names that were set explicitly.
void apply_config_file(const std::string& path, const std::vector<std::string>& given,
                       Options& opts);

/// "cappedigw <command> {resolved options as JSON}".
std::string provenance_line(const std::string& command, const Options& opts);

GammaSchedule parse_gamma_schedule(const std::string& tag);

/// Sample-count comparison on the needle instance.
void normcs_bench(const Options& opts);
/// Online runs per (dataset, seed, algorithm) with per-job metrics/exhaust and a paired summary.
void online(const Options& opts);
/// Offline learners trained on the exhaust written by `online`.
void offline(const Options& opts);
/// Windowed greedy fraction of an exhaust file, or of a fresh SmoothIGW needle run.
void greedy_fraction(const Options& opts);
/// kappa_inf sweep over {2, 4, 24}.
void sensitivity(const Options& opts);

}  // namespace cigw::cli
