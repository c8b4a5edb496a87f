#include "cappedigw/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "cappedigw/core.hpp"
#include "cappedigw/csv.hpp"
#include "cappedigw/rng.hpp"

namespace cigw {

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw InvalidConfig("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto k = static_cast<std::size_t>(std::floor(h));
  if (k + 1 >= values.size()) return values.back();
  return values[k] + (h - static_cast<double>(k)) * (values[k + 1] - values[k]);
}

Interval percentile_interval(const std::vector<double>& samples, double level) {
  if (!(level > 0.0 && level < 1.0)) throw InvalidConfig("level must lie in (0, 1)");
  const double tail = 0.5 * (1.0 - level);
  return {quantile(samples, tail), quantile(samples, 1.0 - tail)};
}

std::vector<double> bootstrap_means(std::span<const double> values, int resamples,
                                    std::uint64_t seed) {
  if (values.size() < 2) throw InvalidConfig("bootstrap needs at least two values");
  if (resamples < 1) throw InvalidConfig("resamples must be positive");
  Rng rng(derive_seed(seed, Stream::kBootstrap, 0));
  const std::size_t n = values.size();
  std::vector<double> means(static_cast<std::size_t>(resamples));
  for (auto& m : means) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += values[rng.below(n)];
    m = total / static_cast<double>(n);
  }
  return means;
}

Interval bootstrap_ci(std::span<const double> values, double level, int resamples,
                      std::uint64_t seed) {
  return percentile_interval(bootstrap_means(values, resamples, seed), level);
}

Interval paired_bootstrap_ci(std::span<const double> a, std::span<const double> b, double level,
                             int resamples, std::uint64_t seed) {
  if (a.size() != b.size()) throw InvalidConfig("paired samples differ in length");
  std::vector<double> diffs(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diffs[i] = a[i] - b[i];
  return bootstrap_ci(diffs, level, resamples, seed);
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::kWinA:
      return "win_a";
    case Verdict::kWinB:
      return "win_b";
    case Verdict::kTie:
      return "tie";
  }
  return "tie";
}

Verdict classify(const Interval& ci) {
  if (ci.lo > ci.hi) throw InvalidConfig("classify: interval has lo > hi");
  if (ci.lo > 0.0) return Verdict::kWinB;
  if (ci.hi < 0.0) return Verdict::kWinA;
  return Verdict::kTie;
}

SummaryRow summarize(std::string dataset, std::span<const double> a, std::span<const double> b,
                     double level, int resamples, std::uint64_t seed) {
  SummaryRow row;
  row.dataset = std::move(dataset);
  row.ci = paired_bootstrap_ci(a, b, level, resamples, seed);
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) total += a[i] - b[i];
  row.mean_diff = total / static_cast<double>(a.size());
  row.verdict = classify(row.ci);
  return row;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "dataset,mean_diff,ci_lo,ci_hi,verdict\n";
  for (const auto& r : rows) {
    out << r.dataset << ',' << csv::num(r.mean_diff) << ',' << csv::num(r.ci.lo) << ','
        << csv::num(r.ci.hi) << ',' << to_string(r.verdict) << '\n';
  }
}

}  // namespace cigw
