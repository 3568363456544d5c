#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "env.hpp"
#include "metrics.hpp"
#include "reward.hpp"
#include "scheduler.hpp"
#include "trace.hpp"

namespace bingo {

/// Reward assigned to each episode during training.
enum class RewardKind {
  kBingo,         // phase-scheduled significance-aware reward
  kVanilla,       // correctness only
  kStaticLength,  // correctness minus a flat per-token penalty
  kSigOnly,       // correctness minus a penalty on insignificant tokens only
};

const char* reward_kind_name(RewardKind kind);

/// Parse "bingo" / "vanilla" / "static-length" / "sig-only" (ConfigError
/// otherwise).
RewardKind parse_reward_kind(const std::string& name);

/// Scale of the accuracy series fed to the scheduler. The default slope
/// threshold (beta = 2.5) is calibrated for percentage points.
enum class AccuracyScale { kPercent, kFraction };

struct PpoConfig {
  int rollouts_per_update = 384;
  int minibatch_size = 384;  // >= rollouts_per_update means full batch
  int epochs_per_update = 4;
  double actor_lr = 0.4;
  double critic_lr = 0.01;
  double clip_epsilon = 0.2;
  double kl_coeff = 0.001;      // penalty toward the update's starting policy
  double grad_clip_norm = 0.5;  // L2 cap on the policy gradient
  double gamma = 0.97;          // discount (episodes here are single-step)
  double gae_lambda = 0.9;
  bool normalize_advantages = true;
  int reference_rollouts = 384;  // uniform pre-pass sizing the frozen reference
  int eval_rollouts = 8000;      // final frozen-policy evaluation
};

void validate(const PpoConfig& config);

/// How the length-reward reference is obtained.
struct ReferencePolicy {
  RefSource source = RefSource::kFrozenBaselineMean;
  // Used only with RefSource::kFixedConstant.
  double fixed_significant = 0.0;
  double fixed_insignificant = 0.0;
};

/// Generalised advantage estimates for one episode, terminal bootstrap zero.
/// rewards and values must be equal-length and non-empty.
std::vector<double> gae(const std::vector<double>& rewards,
                        const std::vector<double>& values, double gamma,
                        double lambda);

/// Clipped surrogate objective for one sample:
/// min(ratio * adv, clamp(ratio, 1 - eps, 1 + eps) * adv).
double clipped_surrogate(double ratio, double advantage, double epsilon);

/// Exact derivative of clipped_surrogate with respect to ratio: the
/// advantage on the unclipped branch, zero where the clip is active.
double surrogate_gradient(double ratio, double advantage, double epsilon);

/// Numerically safe softmax / log-softmax over a logit vector.
std::vector<double> softmax(const std::vector<double>& logits);
std::vector<double> log_softmax(const std::vector<double>& logits);

/// One row of the training log, written as
/// step,accuracy,mean_sig_len,mean_insig_len,mean_reward,k,phase,lambda_t
struct UpdateRow {
  int step = 0;
  double accuracy_percent = 0.0;
  double mean_significant = 0.0;
  double mean_insignificant = 0.0;
  double mean_reward = 0.0;
  double slope = 0.0;
  Phase phase = Phase::kExploration;
  int decay_counter = 0;
  double lambda_t = 0.0;
};

/// Final frozen-policy evaluation.
struct EvalSummary {
  double accuracy_percent = 0.0;
  double mean_length = 0.0;
  double mean_significant = 0.0;
  double mean_insignificant = 0.0;
  double significant_ratio = 0.0;
  double l_acc = 0.0;
  int n = 0;
};

/// Everything one training run needs.
struct TrainSpec {
  SynthTask task;
  PpoConfig ppo;
  RewardConfig reward;
  SchedulerConfig scheduler;
  ReferencePolicy reference;
  RewardKind reward_kind = RewardKind::kBingo;
  AccuracyScale accuracy_scale = AccuracyScale::kPercent;
  int updates = 300;
  std::uint64_t seed = 1;
  double l_max = 8192.0;  // for the length-adjusted accuracy of the final eval
};

void validate(const TrainSpec& spec);

struct TrainResult {
  std::vector<UpdateRow> log;
  SchedulerState scheduler;
  std::vector<double> policy_logits;
  double baseline = 0.0;
  ReferenceStats reference;
  EvalSummary eval;
  MetricsReport eval_report;
  // Largest |ratio - 1| seen before the first parameter step of any update;
  // must be ~0 if importance ratios are wired correctly.
  double max_first_epoch_ratio_deviation = 0.0;
};

/// Run the toy policy-gradient loop: tabular softmax policy over the action
/// grid, scalar reward baseline, clipped-ratio updates with a small penalty
/// toward each update's starting policy, and the phase scheduler driving the
/// reward. Deterministic for a fixed spec. Throws Error if any reward,
/// advantage, or parameter turns non-finite (with the offending update in
/// the message).
TrainResult train(const TrainSpec& spec);

/// Plain-text checkpoint of the trained policy (logits plus the reward
/// baseline); read_policy_checkpoint round-trips it exactly.
struct PolicyCheckpoint {
  std::uint64_t seed = 0;
  int updates = 0;
  double baseline = 0.0;
  std::vector<double> logits;
};

void write_policy_checkpoint(const std::string& path, const TrainSpec& spec,
                             const TrainResult& result);
PolicyCheckpoint read_policy_checkpoint(const std::string& path);

}  // namespace bingo
