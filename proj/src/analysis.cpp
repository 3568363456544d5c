#include "analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include <fmt/core.h>

#include "errors.hpp"
#include "metrics.hpp"
#include "rng.hpp"

namespace bingo {

namespace {

void require_concave(const AccuracyCurve& curve) {
  validate(curve);
  if (curve.shape != CurveShape::kExponentialSaturation) {
    throw ConfigError(
        "schedule analysis needs a strictly concave accuracy curve; the "
        "logistic shape is convex below its midpoint");
  }
}

double objective(const AccuracyCurve& curve, double lambda, double length) {
  return eval_curve(curve, length) - lambda * length;
}

}  // namespace

EquilibriumResult static_equilibrium(const AccuracyCurve& curve, double lambda,
                                     double cap) {
  require_concave(curve);
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument(
        fmt::format("penalty weight must be positive and finite, got {}", lambda));
  }
  if (!(cap > 0.0)) {
    throw std::invalid_argument(fmt::format("search cap must be positive, got {}", cap));
  }
  if (lambda >= eval_curve_derivative(curve, 0.0)) {
    return {0.0, EquilibriumBound::kAtZero};
  }
  if (lambda <= eval_curve_derivative(curve, cap)) {
    return {cap, EquilibriumBound::kCapped};
  }
  // A' is strictly decreasing, so A'(L) = lambda brackets between 0 and cap.
  double lo = 0.0;
  double hi = cap;
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    if (eval_curve_derivative(curve, mid) > lambda) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {0.5 * (lo + hi), EquilibriumBound::kInterior};
}

ScheduleComparison compare_schedules(const AccuracyCurve& curve,
                                     double lambda_terminal, double alpha,
                                     int horizon) {
  require_concave(curve);
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument(
        fmt::format("ramp rate must be positive and finite, got {}", alpha));
  }
  if (horizon < 1) {
    throw std::invalid_argument(fmt::format("horizon must be >= 1, got {}", horizon));
  }
  if (alpha * (horizon - 1) < lambda_terminal) {
    throw std::invalid_argument(fmt::format(
        "horizon {} too short: the ramp reaches the terminal weight {} only "
        "after {} steps",
        horizon, lambda_terminal,
        1 + static_cast<long long>(std::ceil(lambda_terminal / alpha))));
  }

  const EquilibriumResult static_opt = static_equilibrium(curve, lambda_terminal);

  // Phase one parks the policy at the saturation length; from t0 on the
  // penalty weight climbs linearly (capped at the terminal weight) and the
  // length tracks the equilibrium of the current weight.
  double length = curve.l_star;
  for (int t = 1; t <= horizon; ++t) {
    const double lambda_t = std::min(lambda_terminal, alpha * (t - 1));
    if (lambda_t > 0.0) {
      length = static_equilibrium(curve, lambda_t).length;
    }
  }

  ScheduleComparison cmp;
  cmp.lambda_terminal = lambda_terminal;
  cmp.l_static = static_opt.length;
  cmp.l_dynamic = length;
  cmp.j_static = objective(curve, lambda_terminal, cmp.l_static);
  cmp.j_dynamic = objective(curve, lambda_terminal, cmp.l_dynamic);
  cmp.dominance_gap = cmp.j_dynamic - cmp.j_static;
  return cmp;
}

std::vector<OracleTrace> make_oracle_batch(int n, std::uint64_t seed,
                                           double flip_fraction) {
  if (n < 1) {
    throw std::invalid_argument(fmt::format("batch size must be >= 1, got {}", n));
  }
  if (flip_fraction < 0.0 || flip_fraction > 1.0) {
    throw std::invalid_argument(
        fmt::format("flip fraction must lie in [0, 1], got {}", flip_fraction));
  }
  const auto flips =
      static_cast<int>(std::llround(flip_fraction * static_cast<double>(n)));

  std::mt19937_64 eng(derive_seed(seed, Stream::kStreamOracle, 0));
  std::vector<OracleTrace> batch;
  batch.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int n_sig = 2 + static_cast<int>(canonical(eng) * 11.0);   // 2..12
    const int n_insig = static_cast<int>(canonical(eng) * 21.0);     // 0..20
    OracleTrace entry;
    entry.trace.prompt_id = fmt::format("oracle-{}", i);
    entry.trace.correct = true;
    entry.trace.tokens.reserve(static_cast<std::size_t>(n_sig + n_insig));
    for (int s = 0; s < n_sig; ++s) {
      entry.trace.tokens.push_back({fmt::format("key{}", s), 0.9});
    }
    for (int s = 0; s < n_insig; ++s) {
      entry.trace.tokens.push_back({fmt::format("pad{}", s), 0.1});
    }
    entry.correct_after_deletion = i >= flips;
    batch.push_back(std::move(entry));
  }
  return batch;
}

DominanceReport dominance_check(const std::vector<OracleTrace>& batch,
                                double lambda, double epsilon_bound, double tau) {
  if (batch.empty()) throw DataError("dominance check on an empty batch");
  if (lambda < 0.0 || !std::isfinite(lambda)) {
    throw std::invalid_argument(
        fmt::format("penalty weight must be >= 0 and finite, got {}", lambda));
  }

  const double n = static_cast<double>(batch.size());
  double sum_sig = 0.0;
  double sum_r_sig = 0.0;
  double sum_r_len = 0.0;
  double kept = 0.0;
  double full = 0.0;
  for (const OracleTrace& entry : batch) {
    const SignificanceCounts counts = classify_tokens(entry.trace, tau);
    const double l_sig = static_cast<double>(counts.significant);
    const double l_insig = static_cast<double>(counts.insignificant);
    sum_sig += l_sig;
    full += entry.trace.correct ? 1.0 : 0.0;
    kept += entry.correct_after_deletion ? 1.0 : 0.0;
    // Length-penalised reward: correctness of the full text, every token pays.
    sum_r_len += (entry.trace.correct ? 1.0 : 0.0) - lambda * (l_sig + l_insig);
    // Significance-aware reward: correctness of the significant skeleton,
    // only insignificant tokens pay.
    sum_r_sig += (entry.correct_after_deletion ? 1.0 : 0.0) - lambda * l_insig;
  }

  DominanceReport report;
  report.lambda = lambda;
  report.mean_significant = sum_sig / n;
  report.mean_r_sig = sum_r_sig / n;
  report.mean_r_len = sum_r_len / n;
  report.margin = report.mean_r_sig - report.mean_r_len;
  report.accuracy_drop = (full - kept) / n;
  report.epsilon_bound = epsilon_bound;
  report.dominance_holds = report.mean_r_sig > report.mean_r_len;
  report.bound_predicts = lambda * report.mean_significant > epsilon_bound;
  return report;
}

std::vector<SweepRow> schedule_sweep(double l_max) {
  const AccuracyCurve curves[] = {
      AccuracyCurve::exponential(0.9, 200.0),
      AccuracyCurve::exponential(0.8, 150.0),
      AccuracyCurve::exponential(0.95, 300.0),
      AccuracyCurve::exponential(0.7, 100.0),
      AccuracyCurve::exponential(0.85, 250.0),
  };
  const double ramp_divisors[] = {2.0, 8.0, 32.0};

  std::vector<SweepRow> rows;
  rows.reserve(5 * 16 * 3);
  for (const AccuracyCurve& curve : curves) {
    const double d0 = eval_curve_derivative(curve, 0.0);
    double fraction = 0.75;
    for (int i = 0; i < 16; ++i, fraction *= 0.6) {
      const double lambda_terminal = fraction * d0;
      for (double divisor : ramp_divisors) {
        const double alpha = lambda_terminal / divisor;
        const int horizon = static_cast<int>(divisor) + 8;
        SweepRow row;
        row.curve_id = curve.id();
        row.lambda_terminal = lambda_terminal;
        row.alpha = alpha;
        row.comparison = compare_schedules(curve, lambda_terminal, alpha, horizon);
        row.lacc_static = l_acc(100.0 * eval_curve(curve, row.comparison.l_static),
                                row.comparison.l_static, l_max);
        row.lacc_dynamic = l_acc(100.0 * eval_curve(curve, row.comparison.l_dynamic),
                                 row.comparison.l_dynamic, l_max);
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

void write_schedule_sweep_csv(const std::string& path, double l_max) {
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path));
  out << "curve_id,lambda_T,L_s,L_d,J_static,J_dyn,gap,lacc_static,lacc_dyn\n";
  for (const SweepRow& row : schedule_sweep(l_max)) {
    out << fmt::format("{},{},{},{},{},{},{},{},{}\n", row.curve_id,
                       row.lambda_terminal, row.comparison.l_static,
                       row.comparison.l_dynamic, row.comparison.j_static,
                       row.comparison.j_dynamic, row.comparison.dominance_gap,
                       row.lacc_static, row.lacc_dynamic);
  }
  out.flush();
  if (!out.good()) throw IoError(fmt::format("failed writing '{}'", path));
}

void write_dominance_csv(const std::string& path, std::uint64_t seed) {
  const std::vector<OracleTrace> batch = make_oracle_batch(320, seed, 0.05);
  const DominanceReport probe = dominance_check(batch, 1.0, 0.05, 0.5);
  const double boundary = probe.accuracy_drop / probe.mean_significant;

  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path));
  out << "lambda,mean_r_sig,mean_r_len,margin,lambda_mean_sig,accuracy_drop,"
         "holds,predicted\n";
  const double scales[] = {0.25, 0.5, 0.75, 0.9, 1.1, 1.25, 1.5, 2.0, 4.0, 8.0};
  for (double scale : scales) {
    const double lambda = boundary * scale;
    const DominanceReport report =
        dominance_check(batch, lambda, probe.accuracy_drop, 0.5);
    out << fmt::format("{},{},{},{},{},{},{},{}\n", report.lambda,
                       report.mean_r_sig, report.mean_r_len, report.margin,
                       report.lambda * report.mean_significant,
                       report.accuracy_drop, report.dominance_holds ? 1 : 0,
                       report.bound_predicts ? 1 : 0);
  }
  out.flush();
  if (!out.good()) throw IoError(fmt::format("failed writing '{}'", path));
}

void write_penalty_curve_csv(const std::string& path, double l_max, int samples) {
  const std::vector<PenaltyPoint> points = penalty_curve(l_max, samples);
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path));
  out << "length,penalty,derivative\n";
  for (const PenaltyPoint& point : points) {
    out << fmt::format("{},{},{}\n", point.length, point.penalty, point.derivative);
  }
  out.flush();
  if (!out.good()) throw IoError(fmt::format("failed writing '{}'", path));
}

}  // namespace bingo
