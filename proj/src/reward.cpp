#include "reward.hpp"

#include <algorithm>
#include <cmath>
#include "json.hpp"
#include <numbers>

#include "errors.hpp"

namespace bingo {

void validate(const RewardConfig& config) {
  if (!(config.tau > 0.0 && config.tau < 1.0)) {
    throw ConfigError("tau must lie in (0, 1), got " + std::to_string(config.tau));
  }
  if (config.lambda_correct < 0.0 || config.lambda_wrong_insig < 0.0 ||
      config.lambda_wrong_sig < 0.0) {
    throw ConfigError("reward weights must be nonnegative");
  }
  if (config.alpha < 0.0) {
    throw ConfigError("alpha must be nonnegative, got " + std::to_string(config.alpha));
  }
  if (config.static_length_coeff < 0.0) {
    throw ConfigError("static_length_coeff must be nonnegative, got " +
                      std::to_string(config.static_length_coeff));
  }
}

double insignificant_length_reward(const SignificanceCounts& counts,
                                   const ReferenceStats& ref, bool correct) {
  validate_reference(ref);
  const double ratio =
      static_cast<double>(counts.insignificant) / ref.ref_insignificant;
  const double clipped = std::clamp(ratio, 0.0, std::numbers::pi / 2.0);
  return std::cos(clipped) + (correct ? 1.0 : 0.0);
}

double significant_length_reward(const SignificanceCounts& counts,
                                 const ReferenceStats& ref, double k, double beta,
                                 double alpha, int decay_counter) {
  validate_reference(ref);
  if (alpha < 0.0) {
    throw std::invalid_argument("alpha must be nonnegative");
  }
  const double ratio = static_cast<double>(counts.significant) / ref.ref_significant;
  if (ratio == 0.0) return 0.0;
  if (k >= beta) return k * ratio;
  if (decay_counter < 1) {
    throw std::invalid_argument(
        "decay counter must be at least 1 once the slope is below beta");
  }
  return -alpha * static_cast<double>(decay_counter) * ratio;
}

RewardBreakdown bingo_reward(const TokenTrace& trace, const ReferenceStats& ref,
                             const RewardConfig& config, double k,
                             int decay_counter) {
  return bingo_reward(classify_tokens(trace, config.tau), trace.correct, ref,
                      config, k, decay_counter);
}

RewardBreakdown bingo_reward(const SignificanceCounts& counts, bool correct,
                             const ReferenceStats& ref, const RewardConfig& config,
                             double k, int decay_counter) {
  validate(config);
  RewardBreakdown br;
  br.counts = counts;
  br.phase = k >= config.beta ? Phase::kExploration : Phase::kCompression;
  br.r_is = insignificant_length_reward(br.counts, ref, correct);
  br.r_s = significant_length_reward(br.counts, ref, k, config.beta, config.alpha,
                                     decay_counter);

  if (correct) {
    br.insignificant_term = config.lambda_correct * (br.r_is - 1.0);
    br.correctness_term = config.lambda_correct;
    br.significant_term = 0.0;
  } else {
    br.insignificant_term = config.lambda_wrong_insig * (br.r_is - 1.0);
    br.correctness_term = 0.0;
    br.significant_term = std::min(0.0, br.r_s - config.lambda_wrong_sig);
  }
  br.total = br.insignificant_term + br.significant_term + br.correctness_term;
  return br;
}

RewardBreakdown bingo_reward(const TokenTrace& trace, const ReferenceStats& ref,
                             const RewardConfig& config,
                             const SchedulerState& scheduler) {
  return bingo_reward(trace, ref, config, scheduler.slope(),
                      scheduler.decay_counter());
}

double vanilla_reward(const TokenTrace& trace) { return trace.correct ? 1.0 : 0.0; }

double static_length_reward(const TokenTrace& trace, double coeff) {
  if (coeff < 0.0) throw std::invalid_argument("length penalty must be nonnegative");
  return (trace.correct ? 1.0 : 0.0) -
         coeff * static_cast<double>(trace.length());
}

double sig_only_length_reward(const TokenTrace& trace,
                              const SignificanceCounts& counts, double coeff) {
  if (coeff < 0.0) throw std::invalid_argument("length penalty must be nonnegative");
  return (trace.correct ? 1.0 : 0.0) -
         coeff * static_cast<double>(counts.insignificant);
}

std::string score_record_json(const TokenTrace& trace, const RewardBreakdown& br) {
  nlohmann::json rec;
  rec["prompt_id"] = trace.prompt_id;
  rec["correct"] = trace.correct ? 1 : 0;
  rec["L_s"] = br.counts.significant;
  rec["L_is"] = br.counts.insignificant;
  rec["r_is"] = br.r_is;
  rec["r_s"] = std::isfinite(br.r_s) ? nlohmann::json(br.r_s) : nlohmann::json();
  rec["total"] = br.total;
  rec["phase"] = phase_name(br.phase);
  return rec.dump();
}

}  // namespace bingo
