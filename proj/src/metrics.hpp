#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "trace.hpp"

namespace bingo {

/// Length-adjusted accuracy: acc * sqrt(1 - L / l_max), clamped to 0 once the
/// mean length reaches l_max. acc is in percentage points [0, 100]; l_max
/// must be strictly positive (ConfigError otherwise).
double l_acc(double accuracy_percent, double mean_length, double l_max);

/// Round half-up to one decimal, the convention used by reported tables.
double round_half_up_1dp(double value);

struct PenaltyPoint {
  double length = 0.0;
  double penalty = 0.0;     // sqrt(1 - L / l_max)
  double derivative = 0.0;  // d penalty / dL = -1 / (2 l_max sqrt(1 - L/l_max))
};

/// Sample the length-penalty factor and its derivative on an even grid of
/// `samples` points covering [0, l_max). samples must be at least 2.
std::vector<PenaltyPoint> penalty_curve(double l_max, int samples);

/// Fraction of significant tokens across a batch: sum L_s / sum tokens.
/// Empty batches or batches with zero tokens raise DataError.
double significant_token_ratio(const std::vector<TokenTrace>& traces, double tau);

/// Metrics over one slice of a batch.
struct SplitMetrics {
  std::string split;  // "all", "correct", or "incorrect"
  double accuracy_percent = 0.0;
  double mean_length = 0.0;
  double l_acc = 0.0;
  double significant_ratio = 0.0;
  std::size_t n_samples = 0;
};

struct MetricsReport {
  SplitMetrics all;
  SplitMetrics correct;
  SplitMetrics incorrect;
  double tau = 0.0;
  double l_max = 0.0;
};

/// Streaming builder for MetricsReport, so large batches never need to be
/// held in memory at once.
class MetricsAccumulator {
 public:
  MetricsAccumulator(double tau, double l_max);

  void add(const SignificanceCounts& counts, bool correct);
  void add(const TokenTrace& trace);

  MetricsReport report() const;

 private:
  struct Bucket {
    std::size_t n = 0;
    std::size_t n_correct = 0;
    std::size_t token_sum = 0;
    std::size_t significant_sum = 0;
  };
  SplitMetrics finish(const Bucket& bucket, const char* name) const;

  double tau_;
  double l_max_;
  Bucket all_;
  Bucket correct_;
  Bucket incorrect_;
};

/// Full report over a batch, split by correctness.
MetricsReport compute_report(const std::vector<TokenTrace>& traces, double tau,
                             double l_max);

/// Write a report as CSV: split,acc,mean_len,l_acc,str,n_samples
void write_report_csv(const std::string& path, const MetricsReport& report);

/// The same CSV as a string (used for stdout output).
std::string report_to_csv(const MetricsReport& report);

}  // namespace bingo
