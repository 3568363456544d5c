#pragma once

#include <string>

#include "scheduler.hpp"
#include "trace.hpp"

namespace bingo {

/// Weights and thresholds of the unified reward.
struct RewardConfig {
  double tau = 0.5;                 // significance threshold
  double lambda_correct = 5.0;      // scale on the correct branch
  double lambda_wrong_insig = 5.0;  // scale on the incorrect insignificant term
  double lambda_wrong_sig = 5.0;    // offset inside the incorrect significant term
  double alpha = 0.5;               // compression penalty rate per step
  double beta = 2.5;                // slope threshold separating the phases
  double static_length_coeff = 0.001;  // per-token penalty of the baseline rewards
};

/// Reject out-of-domain values (tau outside (0,1), negative weights/rates).
void validate(const RewardConfig& config);

/// Per-sample reward with its additive parts. total is exactly the sum of the
/// three terms for the sample's correctness branch.
struct RewardBreakdown {
  double total = 0.0;
  double insignificant_term = 0.0;
  double significant_term = 0.0;
  double correctness_term = 0.0;
  double r_is = 0.0;  // raw insignificant-length reward, in [0, 2]
  double r_s = 0.0;   // raw significant-length reward (sign depends on phase)
  Phase phase = Phase::kExploration;
  SignificanceCounts counts;
};

/// Insignificant-length reward: cos of the clipped insignificant-length ratio
/// plus the correctness indicator. Decreases from 1 to 0 as the insignificant
/// share grows toward (pi/2) * ref; the +1 applies only to correct samples.
double insignificant_length_reward(const SignificanceCounts& counts,
                                   const ReferenceStats& ref, bool correct);

/// Significant-length reward. While the accuracy slope k is at or above beta
/// (exploration) it pays k * ratio, rewarding length growth; after the
/// transition it charges -alpha * decay_counter * ratio, a penalty that
/// deepens every step. A zero significant count always yields 0, which also
/// keeps the +inf slope sentinel from producing 0 * inf.
double significant_length_reward(const SignificanceCounts& counts,
                                 const ReferenceStats& ref, double k, double beta,
                                 double alpha, int decay_counter);

/// Unified reward at an explicit scheduler snapshot (slope k, decay counter).
/// Correct samples earn lambda_correct * r_is; incorrect samples earn
/// lambda_wrong_insig * (r_is - 1) + min(0, r_s - lambda_wrong_sig).
RewardBreakdown bingo_reward(const TokenTrace& trace, const ReferenceStats& ref,
                             const RewardConfig& config, double k,
                             int decay_counter);

/// Counts-based core of the same reward, for callers that already know the
/// split (the trainer, which never materialises token text).
RewardBreakdown bingo_reward(const SignificanceCounts& counts, bool correct,
                             const ReferenceStats& ref, const RewardConfig& config,
                             double k, int decay_counter);

/// Same, reading the snapshot from a live scheduler.
RewardBreakdown bingo_reward(const TokenTrace& trace, const ReferenceStats& ref,
                             const RewardConfig& config,
                             const SchedulerState& scheduler);

/// Correctness indicator alone.
double vanilla_reward(const TokenTrace& trace);

/// Correctness minus a per-token penalty on the full length.
double static_length_reward(const TokenTrace& trace, double coeff);

/// Correctness minus a per-token penalty on insignificant tokens only.
double sig_only_length_reward(const TokenTrace& trace,
                              const SignificanceCounts& counts, double coeff);

/// One score record as a JSON line:
/// {prompt_id, correct, L_s, L_is, r_is, r_s, total, phase}
std::string score_record_json(const TokenTrace& trace, const RewardBreakdown& br);

}  // namespace bingo
