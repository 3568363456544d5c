#pragma once

#include <string>
#include <vector>

#include "config.hpp"
#include "ppo.hpp"

namespace bingo {

/// Write the per-update training log as CSV:
/// step,accuracy,mean_sig_len,mean_insig_len,mean_reward,k,phase,lambda_t
/// Floats use round-trip precision so a replay of the file reconstructs the
/// run exactly.
void write_training_log_csv(const std::string& path,
                            const std::vector<UpdateRow>& rows);

/// Filesystem layout of one completed run.
struct RunArtifacts {
  std::string config_echo;     // <out>/config.ini
  std::string training_log;    // <out>/logs/training_log.csv
  std::string scheduler_trace; // <out>/logs/scheduler_trace.csv
  std::string final_metrics;   // <out>/reports/final_metrics.csv
  std::string checkpoint;      // <out>/checkpoints/policy.txt
  TrainResult result;
};

/// Run one training experiment and write every artifact into the config's
/// output directory (created if missing).
RunArtifacts run_training(const ExperimentConfig& config, RewardKind kind);

}  // namespace bingo
