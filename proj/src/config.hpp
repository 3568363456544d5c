#pragma once

#include <cstdint>
#include <string>

#include "env.hpp"
#include "ppo.hpp"
#include "reward.hpp"
#include "scheduler.hpp"

namespace bingo {

/// Everything an experiment run reads, grouped the way the config file is.
/// Two values are mirrored after parsing: the scheduler's beta is copied into
/// the reward config (one phase threshold, used by both), and the run seed is
/// copied into the task (one seed per run).
struct ExperimentConfig {
  RewardConfig reward;
  SchedulerConfig scheduler;
  AccuracyScale accuracy_scale = AccuracyScale::kPercent;
  ReferencePolicy reference;
  SynthTask task;
  PpoConfig ppo;
  double l_max = 8192.0;
  std::uint64_t seed = 1;
  int updates = 300;
  std::string out_dir = "out";
};

/// The built-in defaults; configs/reference.ini spells out the same values.
ExperimentConfig default_config();

/// Reject any invalid field combination (delegates to the per-block checks).
void validate(const ExperimentConfig& config);

/// Strict INI-style loader: [section] headers, `key = value` lines, whole-line
/// # or ; comments. Unknown sections, unknown keys, duplicate keys, keys
/// before any section, and malformed values all raise ConfigError naming
/// file and line. Unset keys keep their defaults.
ExperimentConfig load_config(const std::string& path);

/// Serialise a config in the same format load_config reads (round-trips).
std::string config_to_ini(const ExperimentConfig& config);
void write_config_ini(const std::string& path, const ExperimentConfig& config);

/// Numeric field lookup by dotted key, e.g. "reward.tau" or "ppo.actor_lr".
/// Booleans read as 0/1. String-valued keys (paths, shape names) are not
/// addressable this way (ConfigError).
double config_value(const ExperimentConfig& config, const std::string& key);

/// Numeric field update by dotted key (same keys as config_value; integer
/// fields reject fractional values, booleans accept exactly 0 or 1).
/// Mirrored values stay in sync: either beta key updates both copies, and
/// run.seed updates the task seed. Validates the whole config afterwards.
void config_set_value(ExperimentConfig& config, const std::string& key,
                      double value);

/// Assemble the training spec for one run of the given reward.
TrainSpec to_train_spec(const ExperimentConfig& config, RewardKind kind);

}  // namespace bingo
