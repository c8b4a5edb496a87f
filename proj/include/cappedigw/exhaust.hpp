#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "cappedigw/core.hpp"

namespace cigw {

/// One logged interaction. `propensity` is the logged density at `action`
/// with the normalizer taken as 1; greedy (point-mass) draws log 0.
struct ExhaustRecord {
  std::int64_t round = 0;
  Context context;
  double action = 0.0;
  double propensity = 0.0;
  double loss = 0.0;
  bool is_greedy = false;
  Algorithm algorithm = Algorithm::kCappedIgw;
  double beta = 0.0;
  double tau = 1.0;
  double gamma = 1.0;
  double kappa_inf = 1.0;

  bool operator==(const ExhaustRecord&) const = default;
};

struct RoundMetrics {
  std::int64_t round = 0;
  double loss = 0.0;
  double pv_loss = 0.0;
  double beta = 0.0;
  std::int64_t normcs_samples = 0;
  std::int64_t rejection_draws = 0;
  double greedy_mass = 0.0;
  // Unbiased-normalizer estimate 1/z_hat from independent base draws (capped only).
  double kappa_hat = 1.0;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Single JSON object, no trailing newline.
std::string encode_exhaust(const ExhaustRecord& record);
ExhaustRecord decode_exhaust(const std::string& line, std::size_t line_number = 1);

/// Human-readable descriptions of every violated record invariant; empty when valid.
std::vector<std::string> check_invariants(const ExhaustRecord& record);

void write_exhaust(std::ostream& out, const std::vector<ExhaustRecord>& records);
std::vector<ExhaustRecord> read_exhaust(std::istream& in);
std::vector<ExhaustRecord> read_exhaust_file(const std::string& path);

void write_metrics_csv(std::ostream& out, const std::vector<RoundMetrics>& metrics);

}  // namespace cigw
