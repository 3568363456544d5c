#pragma once

#include <cstdint>
#include <string>

#include "trace.hpp"

namespace bingo {

enum class CurveShape { kExponentialSaturation, kLogistic };

/// Accuracy as a function of significant length: nondecreasing, bounded by
/// a_max, effectively flat past l_star.
struct AccuracyCurve {
  double a_max = 0.9;
  double l_star = 200.0;      // length where the curve has saturated
  CurveShape shape = CurveShape::kExponentialSaturation;
  double shape_param = 0.0;   // exp: length scale; logistic: steepness. 0 = derived.

  /// Exponential saturation a_max * (1 - exp(-L / ell)) with ell chosen so
  /// accuracy reaches 99% of a_max exactly at l_star.
  static AccuracyCurve exponential(double a_max, double l_star);

  /// Logistic ramp centred at l_star / 2; steepness defaults to l_star / 10.
  static AccuracyCurve logistic(double a_max, double l_star);

  std::string id() const;  // e.g. "exp-0.9-200" (used in sweep CSVs)
};

void validate(const AccuracyCurve& curve);

/// A(L): expected accuracy when emitting L significant tokens.
double eval_curve(const AccuracyCurve& curve, double length);

/// A'(L), analytic.
double eval_curve_derivative(const AccuracyCurve& curve, double length);

/// Fixed discrete action grid: target significant length in {0, 25, ..., 400}
/// crossed with a verbosity level in {0, 1, 2, 3} mapping to 50 * level
/// insignificant tokens.
class ActionGrid {
 public:
  static constexpr int kSignificantLevels = 17;
  static constexpr int kSignificantStep = 25;
  static constexpr int kVerbosityLevels = 4;
  static constexpr int kVerbosityTokens = 50;

  static constexpr int size() { return kSignificantLevels * kVerbosityLevels; }

  /// Components of an action index (row-major: significant level major).
  static int significant_target(int action);
  static int insignificant_target(int action);
  static int action_index(int significant_level, int verbosity_level);
};

/// One synthetic "task": an accuracy curve plus sampling noise and a seed.
struct SynthTask {
  double difficulty = 0.0;       // scales the accuracy ceiling: a_max * (1 - difficulty)
  AccuracyCurve curve;
  double verbosity_noise = 0.0;  // stddev of jitter on the insignificant count
  std::uint64_t seed = 1;
};

void validate(const SynthTask& task);

/// Probability of a correct answer for a commanded significant length.
double success_probability(const SynthTask& task, double significant_length);

/// Result of one environment episode. The counts are the realised
/// (post-noise) token counts; classification at tau = 0.5 recovers them.
struct EpisodeResult {
  TokenTrace trace;
  int significant = 0;
  int insignificant = 0;
  int action = 0;
};

/// Run one episode: sample correctness from the curve at the commanded
/// significant length and emit a synthetic trace with labelled scores
/// (significant 0.9, insignificant 0.1). Deterministic in
/// (task.seed, episode): replaying either gives an identical trace.
EpisodeResult rollout(const SynthTask& task, int action, std::uint64_t episode);

/// Counts-only view of one episode, skipping token materialisation. Makes
/// exactly the draws rollout() makes, so for equal (task, action, episode)
/// the two agree on correctness and both counts.
struct EpisodeOutcome {
  bool correct = false;
  int significant = 0;
  int insignificant = 0;
};

EpisodeOutcome rollout_outcome(const SynthTask& task, int action,
                               std::uint64_t episode);

}  // namespace bingo
