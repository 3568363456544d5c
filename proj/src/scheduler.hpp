#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bingo {

/// Training regime: length-permissive exploration, then penalised compression.
enum class Phase { kExploration, kCompression };

const char* phase_name(Phase phase);

struct SchedulerConfig {
  int slope_start_step = 50;  // first step at which a slope may be computed
  int slope_period = 10;      // trailing window length for the fit
  double beta = 2.5;          // slope threshold that ends exploration
};

/// Reject out-of-domain values (start step < 1, window < 2, non-finite beta).
void validate(const SchedulerConfig& config);

/// Ordinary-least-squares slope of accuracy over step. Needs at least two
/// points with distinct steps (DataError otherwise).
double ols_slope(const std::vector<std::pair<std::int64_t, double>>& window);

/// Snapshot of the scheduler after one recorded step.
struct SchedulerRecord {
  std::int64_t step = 0;
  double accuracy = 0.0;
  double slope = 0.0;  // +inf until the first full window
  Phase phase = Phase::kExploration;
  int decay_counter = 0;
};

/// Accuracy-plateau detector driving the penalty schedule.
///
/// Feed it one batch accuracy per training step (strictly increasing steps).
/// From `slope_start_step` on, once `slope_period` points exist, it fits the
/// trailing-window slope; before that the slope reports +inf, which counts as
/// "still improving". The first time the slope drops below `beta` the phase
/// flips to compression — permanently — and the decay counter starts at 1,
/// incrementing by one on every subsequent step.
class SchedulerState {
 public:
  explicit SchedulerState(SchedulerConfig config = {});

  /// Record one step's accuracy and update slope/phase/decay.
  void record_accuracy(std::int64_t step, double accuracy);

  double slope() const { return slope_; }
  Phase phase() const { return phase_; }
  int decay_counter() const { return decay_counter_; }
  std::optional<std::int64_t> transition_step() const { return transition_step_; }
  const SchedulerConfig& config() const { return config_; }
  const std::vector<SchedulerRecord>& history() const { return history_; }

 private:
  SchedulerConfig config_;
  std::vector<std::pair<std::int64_t, double>> series_;
  std::vector<SchedulerRecord> history_;
  double slope_;
  Phase phase_ = Phase::kExploration;
  int decay_counter_ = 0;
  std::optional<std::int64_t> transition_step_;
};

/// Penalty weight for the current step: 0 while exploring, alpha * t after
/// the transition, where t is the decay counter. Never decreases.
double lambda_schedule(const SchedulerState& state, double alpha);

/// Write the recorded trace as CSV:
/// step,accuracy,k,phase,decay_counter,lambda_t
/// Floats are written with round-trip precision so the file replays exactly.
void write_scheduler_csv(const std::string& path, const SchedulerState& state,
                         double alpha);

}  // namespace bingo
