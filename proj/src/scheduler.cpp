#include "scheduler.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <limits>

#include "errors.hpp"

namespace bingo {

const char* phase_name(Phase phase) {
  return phase == Phase::kExploration ? "exploration" : "compression";
}

double ols_slope(const std::vector<std::pair<std::int64_t, double>>& window) {
  if (window.size() < 2) {
    throw DataError("slope fit needs at least two points, got " +
                    std::to_string(window.size()));
  }
  double step_mean = 0.0;
  double acc_mean = 0.0;
  for (const auto& [step, acc] : window) {
    step_mean += static_cast<double>(step);
    acc_mean += acc;
  }
  step_mean /= static_cast<double>(window.size());
  acc_mean /= static_cast<double>(window.size());

  double cov = 0.0;
  double var = 0.0;
  for (const auto& [step, acc] : window) {
    const double ds = static_cast<double>(step) - step_mean;
    cov += ds * (acc - acc_mean);
    var += ds * ds;
  }
  if (var == 0.0) {
    throw DataError("slope fit needs at least two distinct steps");
  }
  return cov / var;
}

void validate(const SchedulerConfig& config) {
  if (config.slope_period < 2) {
    throw ConfigError("slope_period must be at least 2, got " +
                      std::to_string(config.slope_period));
  }
  if (config.slope_start_step < 1) {
    throw ConfigError("slope_start_step must be at least 1, got " +
                      std::to_string(config.slope_start_step));
  }
  if (!std::isfinite(config.beta)) {
    throw ConfigError("beta must be finite");
  }
}

SchedulerState::SchedulerState(SchedulerConfig config)
    : config_(config), slope_(std::numeric_limits<double>::infinity()) {
  validate(config_);
}

void SchedulerState::record_accuracy(std::int64_t step, double accuracy) {
  if (!series_.empty() && step <= series_.back().first) {
    throw DataError(fmt::format("steps must be strictly increasing: {} after {}",
                                step, series_.back().first));
  }
  series_.emplace_back(step, accuracy);

  const auto period = static_cast<std::size_t>(config_.slope_period);
  if (step >= config_.slope_start_step && series_.size() >= period) {
    const std::vector<std::pair<std::int64_t, double>> window(
        series_.end() - static_cast<std::ptrdiff_t>(period), series_.end());
    slope_ = ols_slope(window);
  } else {
    slope_ = std::numeric_limits<double>::infinity();
  }

  if (phase_ == Phase::kCompression) {
    ++decay_counter_;  // one tick per recorded step; never resets
  } else if (slope_ < config_.beta) {
    phase_ = Phase::kCompression;
    decay_counter_ = 1;
    transition_step_ = step;
  }

  history_.push_back(SchedulerRecord{step, accuracy, slope_, phase_, decay_counter_});
}

double lambda_schedule(const SchedulerState& state, double alpha) {
  if (alpha < 0.0) {
    throw std::invalid_argument("penalty rate alpha must be nonnegative");
  }
  if (state.phase() == Phase::kExploration) return 0.0;
  return alpha * static_cast<double>(state.decay_counter());
}

void write_scheduler_csv(const std::string& path, const SchedulerState& state,
                         double alpha) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write scheduler trace: " + path);
  out << "step,accuracy,k,phase,decay_counter,lambda_t\n";
  for (const SchedulerRecord& rec : state.history()) {
    const double lambda_t = rec.phase == Phase::kExploration
                                ? 0.0
                                : alpha * static_cast<double>(rec.decay_counter);
    out << fmt::format("{},{},{},{},{},{}\n", rec.step, rec.accuracy, rec.slope,
                       phase_name(rec.phase), rec.decay_counter, lambda_t);
  }
  if (!out) throw IoError("short write to scheduler trace: " + path);
}

}  // namespace bingo
