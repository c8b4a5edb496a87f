#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cigw {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Linear-interpolation quantile (R type 7) of unsorted `values`.
double quantile(std::vector<double> values, double p);

/// Equal-tailed percentile interval of `samples` at `level`.
Interval percentile_interval(const std::vector<double>& samples, double level);

/// Means of `resamples` with-replacement resamples of `values`.
std::vector<double> bootstrap_means(std::span<const double> values, int resamples,
                                    std::uint64_t seed);

/// Percentile bootstrap CI of the mean of `values`.
Interval bootstrap_ci(std::span<const double> values, double level = 0.90,
                      int resamples = 10000, std::uint64_t seed = 0);

/// Percentile bootstrap CI of the mean paired difference a[i] - b[i].
Interval paired_bootstrap_ci(std::span<const double> a, std::span<const double> b,
                             double level = 0.90, int resamples = 10000,
                             std::uint64_t seed = 0);

enum class Verdict { kWinA, kWinB, kTie };

std::string_view to_string(Verdict verdict);

/// For an interval on Loss(A) - Loss(B): tie when it contains 0, B wins when
/// it is entirely positive, A wins when entirely negative.
Verdict classify(const Interval& ci);

struct SummaryRow {
  std::string dataset;
  double mean_diff = 0.0;
  Interval ci;
  Verdict verdict = Verdict::kTie;
};

SummaryRow summarize(std::string dataset, std::span<const double> a, std::span<const double> b,
                     double level = 0.90, int resamples = 10000, std::uint64_t seed = 0);

/// Header dataset,mean_diff,ci_lo,ci_hi,verdict.
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

}  // namespace cigw
