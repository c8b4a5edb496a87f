#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "cappedigw/cli.hpp"
#include "cappedigw/exhaust.hpp"

namespace {

namespace fs = std::filesystem;
using cigw::cli::Options;

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::path(::testing::TempDir()) / ("cigw_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(Config, FlagsWinOverFile) {
  const auto dir = fresh_dir("config");
  const auto path = dir / "cfg.json";
  std::ofstream(path) << R"({"seeds": 3, "delta": 0.1, "weight_cap": 7, "kappa-inf": 4,
                             "tau": [2, 20], "algorithm": "uniform"})";
  Options opts;
  opts.seeds = 12;
  cigw::cli::apply_config_file(path.string(), {"seeds"}, opts);
  EXPECT_EQ(opts.seeds, 12);
  EXPECT_DOUBLE_EQ(opts.delta, 0.1);
  EXPECT_DOUBLE_EQ(opts.weight_cap, 7.0);
  EXPECT_EQ(opts.kappa_inf, 4.0);
  EXPECT_EQ(opts.taus, (std::vector<double>{2, 20}));
  EXPECT_EQ(opts.algorithms, std::vector<std::string>{"uniform"});
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  const auto dir = fresh_dir("config_bad");
  Options opts;
  std::ofstream(dir / "a.json") << R"({"sedes": 3})";
  EXPECT_THROW(cigw::cli::apply_config_file((dir / "a.json").string(), {}, opts),
               cigw::InvalidConfig);
  std::ofstream(dir / "b.json") << R"({"seeds": "many"})";
  EXPECT_THROW(cigw::cli::apply_config_file((dir / "b.json").string(), {}, opts),
               cigw::InvalidConfig);
  std::ofstream(dir / "c.json") << "[1, 2]";
  EXPECT_THROW(cigw::cli::apply_config_file((dir / "c.json").string(), {}, opts),
               cigw::InvalidConfig);
  EXPECT_THROW(cigw::cli::apply_config_file((dir / "missing.json").string(), {}, opts),
               cigw::InvalidConfig);
}

TEST(Provenance, LineCarriesResolvedOptions) {
  Options opts;
  opts.seeds = 4;
  opts.kappa_inf = 2.0;
  const auto line = cigw::cli::provenance_line("online", opts);
  const std::string prefix = "cappedigw online ";
  ASSERT_EQ(line.rfind(prefix, 0), 0u);
  const auto j = nlohmann::json::parse(line.substr(prefix.size()));
  EXPECT_EQ(j.at("seeds"), 4);
  EXPECT_EQ(j.at("kappa_inf"), 2.0);
  EXPECT_TRUE(j.at("regsq").is_null());
}

TEST(GammaSchedule, Parse) {
  EXPECT_EQ(cigw::cli::parse_gamma_schedule("fixed"), cigw::GammaSchedule::kFixed);
  EXPECT_EQ(cigw::cli::parse_gamma_schedule("growing"), cigw::GammaSchedule::kGrowing);
  EXPECT_THROW(cigw::cli::parse_gamma_schedule("linear"), cigw::InvalidConfig);
}

Options small_online(const fs::path& out) {
  Options opts;
  opts.seeds = 2;
  opts.horizon = 80;
  opts.out = out.string();
  opts.taus = {4};
  opts.provenance = cigw::cli::provenance_line("online", opts);
  return opts;
}

TEST(Online, WritesArtifactsDeterministically) {
  const auto a = fresh_dir("online_a");
  const auto b = fresh_dir("online_b");
  cigw::cli::online(small_online(a));
  cigw::cli::online(small_online(b));
  for (const auto* rel : {"linear/results.csv", "linear/summary.csv",
                          "linear/capped_igw/seed_1/metrics.csv",
                          "linear/smooth_igw/seed_0/exhaust.jsonl"}) {
    ASSERT_TRUE(fs::exists(a / rel)) << rel;
    EXPECT_FALSE(slurp(a / rel).empty());
  }
  // Everything but the embedded output path must match byte for byte.
  EXPECT_EQ(slurp(a / "linear/capped_igw/seed_1/exhaust.jsonl"),
            slurp(b / "linear/capped_igw/seed_1/exhaust.jsonl"));
  const auto results = slurp(a / "linear/results.csv");
  EXPECT_EQ(results.rfind("# cappedigw online {", 0), 0u);
  const auto records = cigw::read_exhaust_file((a / "linear/capped_igw/seed_0/exhaust.jsonl").string());
  EXPECT_EQ(records.size(), 80u);
}

TEST(Online, OfflineReadsOnlineExhaust) {
  const auto dir = fresh_dir("offline");
  auto opts = small_online(dir);
  opts.horizon = 120;
  cigw::cli::online(opts);
  opts.provenance = cigw::cli::provenance_line("offline", opts);
  cigw::cli::offline(opts);
  const auto text = slurp(dir / "linear/offline_results.csv");
  EXPECT_EQ(text.rfind("# cappedigw offline {", 0), 0u);
  EXPECT_TRUE(fs::exists(dir / "linear/offline_summary.csv"));
}

TEST(NormcsBench, SmallRun) {
  const auto dir = fresh_dir("bench");
  Options opts;
  opts.taus = {2};
  opts.gammas = {16};
  opts.seeds = 3;
  opts.out = dir.string();
  opts.provenance = "cappedigw normcs-bench {}";
  cigw::cli::normcs_bench(opts);
  std::ifstream in(dir / "normcs_bench.csv");
  std::string first;
  std::string header;
  std::string row;
  std::getline(in, first);
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(first, "# cappedigw normcs-bench {}");
  EXPECT_EQ(header.rfind("tau,gamma,delta,kappa_inf,n_fixed", 0), 0u) << header;
  EXPECT_EQ(row.rfind("2,16,0.025,24,958,", 0), 0u) << row;
}

TEST(Online, UnknownEnvIsConfigError) {
  const auto dir = fresh_dir("bad_env");
  auto opts = small_online(dir);
  opts.env = "moon";
  EXPECT_THROW(cigw::cli::online(opts), cigw::InvalidConfig);
}

}  // namespace
