#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "env.hpp"
#include "trace.hpp"

namespace bingo {

/// Where an equilibrium landed relative to the search interval.
enum class EquilibriumBound {
  kInterior,  // solved A'(L) = lambda inside (0, cap)
  kAtZero,    // lambda >= A'(0): no interior solution, optimum at L = 0
  kCapped,    // derivative still above lambda at the cap
};

struct EquilibriumResult {
  double length = 0.0;
  EquilibriumBound bound = EquilibriumBound::kInterior;
};

/// Length maximising A(L) - lambda * L over [0, cap] for a strictly concave
/// curve, via bisection on the monotone derivative (tolerance 1e-9 in L).
/// Only the exponential-saturation shape qualifies (the logistic shape is
/// not concave near zero; ConfigError). lambda must be positive and finite.
EquilibriumResult static_equilibrium(const AccuracyCurve& curve, double lambda,
                                     double cap = 1e6);

/// Outcome of simulating a static and a ramped penalty schedule to their
/// common terminal weight.
struct ScheduleComparison {
  double lambda_terminal = 0.0;
  double l_static = 0.0;
  double l_dynamic = 0.0;
  double j_static = 0.0;   // A(L) - lambda_terminal * L at the static optimum
  double j_dynamic = 0.0;  // same objective at the ramp's resting length
  double dominance_gap = 0.0;  // j_dynamic - j_static
};

/// Simulate the two-phase schedule: no penalty until the policy sits at the
/// saturation length, then lambda_t = alpha * (t - t0) growing each step and
/// capped at lambda_terminal, with the length tracking the current
/// equilibrium. The horizon must be long enough for the ramp to reach the
/// terminal weight (invalid_argument otherwise); beyond that point the
/// result is horizon-invariant.
ScheduleComparison compare_schedules(const AccuracyCurve& curve,
                                     double lambda_terminal, double alpha,
                                     int horizon);

/// A trace together with the oracle decode of its significant skeleton:
/// whether the answer is still correct after deleting every insignificant
/// token.
struct OracleTrace {
  TokenTrace trace;
  bool correct_after_deletion = false;
};

/// Deterministic synthetic batch for the reward-dominance check: every trace
/// is correct on its full text, lengths vary, and exactly
/// round(flip_fraction * n) traces lose correctness when their insignificant
/// tokens are deleted.
std::vector<OracleTrace> make_oracle_batch(int n, std::uint64_t seed,
                                           double flip_fraction);

/// Both sides of the reward-dominance inequality on one batch.
struct DominanceReport {
  double lambda = 0.0;
  double mean_significant = 0.0;  // mean L_s per trace
  double mean_r_sig = 0.0;        // significance-aware reward mean
  double mean_r_len = 0.0;        // full-length-penalty reward mean
  double margin = 0.0;            // mean_r_sig - mean_r_len
  double accuracy_drop = 0.0;     // fraction of answers broken by deletion
  double epsilon_bound = 0.0;     // claimed bound on that fraction
  bool dominance_holds = false;   // mean_r_sig > mean_r_len
  bool bound_predicts = false;    // lambda * mean_significant > epsilon_bound
};

/// Compare the significance-aware reward (correctness judged on the
/// significant skeleton, penalty on insignificant tokens only) against the
/// plain length-penalised reward (correctness on the full text, penalty on
/// every token). Their means obey
///   mean_r_sig - mean_r_len = lambda * mean L_s - accuracy_drop,
/// so dominance holds exactly when the penalty saved on significant tokens
/// outweighs the answers broken by deletion.
DominanceReport dominance_check(const std::vector<OracleTrace>& batch,
                                double lambda, double epsilon_bound, double tau);

/// Write the static-vs-dynamic sweep over a fixed grid of concave curves,
/// terminal weights, and ramp rates (240 combinations) as CSV:
/// curve_id,lambda_T,L_s,L_d,J_static,J_dyn,gap,lacc_static,lacc_dyn
void write_schedule_sweep_csv(const std::string& path, double l_max = 8192.0);

/// Rows of the same sweep, for callers that want the numbers directly.
struct SweepRow {
  std::string curve_id;
  double lambda_terminal = 0.0;
  double alpha = 0.0;
  ScheduleComparison comparison;
  double lacc_static = 0.0;
  double lacc_dynamic = 0.0;
};

std::vector<SweepRow> schedule_sweep(double l_max = 8192.0);

/// Write the reward-dominance scan (fixed oracle batch, rising lambda) as
/// CSV: lambda,mean_r_sig,mean_r_len,margin,lambda_mean_sig,accuracy_drop,
/// holds,predicted
void write_dominance_csv(const std::string& path, std::uint64_t seed);

/// Write the sampled length-penalty factor of the efficiency metric as CSV:
/// length,penalty,derivative
void write_penalty_curve_csv(const std::string& path, double l_max, int samples);

}  // namespace bingo
