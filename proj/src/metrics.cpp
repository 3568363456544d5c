#include "metrics.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>

#include "errors.hpp"

namespace bingo {

double l_acc(double accuracy_percent, double mean_length, double l_max) {
  if (!(l_max > 0.0)) {
    throw ConfigError("l_max must be strictly positive, got " + std::to_string(l_max));
  }
  if (!(accuracy_percent >= 0.0 && accuracy_percent <= 100.0)) {
    throw std::invalid_argument("accuracy must lie in [0, 100], got " +
                                std::to_string(accuracy_percent));
  }
  if (!(mean_length >= 0.0)) {
    throw std::invalid_argument("mean length must be nonnegative, got " +
                                std::to_string(mean_length));
  }
  if (mean_length >= l_max) return 0.0;
  return accuracy_percent * std::sqrt(1.0 - mean_length / l_max);
}

double round_half_up_1dp(double value) {
  return std::floor(value * 10.0 + 0.5) / 10.0;
}

std::vector<PenaltyPoint> penalty_curve(double l_max, int samples) {
  if (!(l_max > 0.0)) {
    throw ConfigError("l_max must be strictly positive, got " + std::to_string(l_max));
  }
  if (samples < 2) {
    throw std::invalid_argument("penalty curve needs at least 2 samples, got " +
                                std::to_string(samples));
  }
  std::vector<PenaltyPoint> points;
  points.reserve(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    const double length =
        l_max * static_cast<double>(i) / static_cast<double>(samples);
    const double remaining = 1.0 - length / l_max;
    PenaltyPoint pt;
    pt.length = length;
    pt.penalty = std::sqrt(remaining);
    pt.derivative = -1.0 / (2.0 * l_max * std::sqrt(remaining));
    points.push_back(pt);
  }
  return points;
}

double significant_token_ratio(const std::vector<TokenTrace>& traces, double tau) {
  if (traces.empty()) throw DataError("significant-token ratio of an empty batch");
  std::size_t significant = 0;
  std::size_t total = 0;
  for (const TokenTrace& trace : traces) {
    const SignificanceCounts counts = classify_tokens(trace, tau);
    significant += counts.significant;
    total += counts.total();
  }
  if (total == 0) throw DataError("significant-token ratio of a zero-token batch");
  return static_cast<double>(significant) / static_cast<double>(total);
}

MetricsAccumulator::MetricsAccumulator(double tau, double l_max)
    : tau_(tau), l_max_(l_max) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw ConfigError("tau must lie in (0, 1), got " + std::to_string(tau));
  }
  if (!(l_max > 0.0)) {
    throw ConfigError("l_max must be strictly positive, got " + std::to_string(l_max));
  }
}

void MetricsAccumulator::add(const SignificanceCounts& counts, bool correct) {
  auto bump = [&](Bucket& bucket) {
    ++bucket.n;
    if (correct) ++bucket.n_correct;
    bucket.token_sum += counts.total();
    bucket.significant_sum += counts.significant;
  };
  bump(all_);
  bump(correct ? correct_ : incorrect_);
}

void MetricsAccumulator::add(const TokenTrace& trace) {
  add(classify_tokens(trace, tau_), trace.correct);
}

SplitMetrics MetricsAccumulator::finish(const Bucket& bucket,
                                        const char* name) const {
  SplitMetrics out;
  out.split = name;
  out.n_samples = bucket.n;
  if (bucket.n == 0) return out;  // empty split reports zeros
  out.accuracy_percent =
      100.0 * static_cast<double>(bucket.n_correct) / static_cast<double>(bucket.n);
  out.mean_length =
      static_cast<double>(bucket.token_sum) / static_cast<double>(bucket.n);
  out.l_acc = l_acc(out.accuracy_percent, out.mean_length, l_max_);
  out.significant_ratio =
      bucket.token_sum == 0
          ? 0.0
          : static_cast<double>(bucket.significant_sum) /
                static_cast<double>(bucket.token_sum);
  return out;
}

MetricsReport MetricsAccumulator::report() const {
  MetricsReport report;
  report.tau = tau_;
  report.l_max = l_max_;
  report.all = finish(all_, "all");
  report.correct = finish(correct_, "correct");
  report.incorrect = finish(incorrect_, "incorrect");
  return report;
}

MetricsReport compute_report(const std::vector<TokenTrace>& traces, double tau,
                             double l_max) {
  MetricsAccumulator acc(tau, l_max);
  for (const TokenTrace& trace : traces) acc.add(trace);
  return acc.report();
}

std::string report_to_csv(const MetricsReport& report) {
  std::string out = "split,acc,mean_len,l_acc,str,n_samples\n";
  for (const SplitMetrics* split : {&report.all, &report.correct, &report.incorrect}) {
    out += fmt::format("{},{},{},{},{},{}\n", split->split, split->accuracy_percent,
                       split->mean_length, split->l_acc, split->significant_ratio,
                       split->n_samples);
  }
  return out;
}

void write_report_csv(const std::string& path, const MetricsReport& report) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write metrics report: " + path);
  out << report_to_csv(report);
  if (!out) throw IoError("short write to metrics report: " + path);
}

}  // namespace bingo
