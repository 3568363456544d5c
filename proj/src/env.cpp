#include "env.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string_view>

#include <fmt/core.h>

#include "errors.hpp"
#include "rng.hpp"

namespace bingo {

namespace {

// Length scale putting the exponential curve at 99% of its ceiling when the
// significant length reaches l_star: 1 - exp(-l_star / ell) = 0.99.
double exponential_scale(double l_star) { return l_star / std::log(100.0); }

constexpr std::array<std::string_view, 12> kSignificantVocab = {
    "let", "x=", "3*", "y+", "7;", "therefore", "sum", "=", "42",
    "check:", "odd", "prime",
};

constexpr std::array<std::string_view, 10> kInsignificantVocab = {
    "well", "so", "basically", "now", "then", "okay", "hmm", "also",
    "just", "anyway",
};

constexpr double kSignificantScore = 0.9;
constexpr double kInsignificantScore = 0.1;

// Deterministic unit gaussian built from two canonical draws (Box-Muller).
// std::normal_distribution is implementation-defined, which would break
// byte-level reproducibility across standard libraries.
double gaussian(std::mt19937_64& eng) {
  double u1 = canonical(eng);
  double u2 = canonical(eng);
  u1 = std::max(u1, 1e-300);  // guard log(0)
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

AccuracyCurve AccuracyCurve::exponential(double a_max, double l_star) {
  AccuracyCurve curve;
  curve.a_max = a_max;
  curve.l_star = l_star;
  curve.shape = CurveShape::kExponentialSaturation;
  curve.shape_param = 0.0;
  validate(curve);
  return curve;
}

AccuracyCurve AccuracyCurve::logistic(double a_max, double l_star) {
  AccuracyCurve curve;
  curve.a_max = a_max;
  curve.l_star = l_star;
  curve.shape = CurveShape::kLogistic;
  curve.shape_param = 0.0;
  validate(curve);
  return curve;
}

std::string AccuracyCurve::id() const {
  const char* name =
      shape == CurveShape::kExponentialSaturation ? "exp" : "logistic";
  return fmt::format("{}-{}-{}", name, a_max, l_star);
}

void validate(const AccuracyCurve& curve) {
  if (!(curve.a_max > 0.0) || !(curve.a_max <= 1.0)) {
    throw ConfigError(
        fmt::format("accuracy ceiling must be in (0, 1], got {}", curve.a_max));
  }
  if (!(curve.l_star > 0.0)) {
    throw ConfigError(fmt::format("saturation length must be positive, got {}",
                                  curve.l_star));
  }
  if (curve.shape_param < 0.0 || !std::isfinite(curve.shape_param)) {
    throw ConfigError(fmt::format("curve shape parameter must be >= 0, got {}",
                                  curve.shape_param));
  }
}

double eval_curve(const AccuracyCurve& curve, double length) {
  if (length < 0.0) {
    throw std::invalid_argument(
        fmt::format("curve evaluated at negative length {}", length));
  }
  switch (curve.shape) {
    case CurveShape::kExponentialSaturation: {
      const double ell = curve.shape_param > 0.0 ? curve.shape_param
                                                 : exponential_scale(curve.l_star);
      return curve.a_max * (1.0 - std::exp(-length / ell));
    }
    case CurveShape::kLogistic: {
      const double steep =
          curve.shape_param > 0.0 ? curve.shape_param : curve.l_star / 10.0;
      const double mid = curve.l_star / 2.0;
      return curve.a_max / (1.0 + std::exp(-(length - mid) / steep));
    }
  }
  throw std::logic_error("unreachable curve shape");
}

double eval_curve_derivative(const AccuracyCurve& curve, double length) {
  if (length < 0.0) {
    throw std::invalid_argument(
        fmt::format("curve derivative at negative length {}", length));
  }
  switch (curve.shape) {
    case CurveShape::kExponentialSaturation: {
      const double ell = curve.shape_param > 0.0 ? curve.shape_param
                                                 : exponential_scale(curve.l_star);
      return curve.a_max / ell * std::exp(-length / ell);
    }
    case CurveShape::kLogistic: {
      const double steep =
          curve.shape_param > 0.0 ? curve.shape_param : curve.l_star / 10.0;
      const double mid = curve.l_star / 2.0;
      const double s = 1.0 / (1.0 + std::exp(-(length - mid) / steep));
      return curve.a_max * s * (1.0 - s) / steep;
    }
  }
  throw std::logic_error("unreachable curve shape");
}

int ActionGrid::significant_target(int action) {
  if (action < 0 || action >= size()) {
    throw std::invalid_argument(fmt::format("action index {} out of [0, {})",
                                            action, size()));
  }
  return (action / kVerbosityLevels) * kSignificantStep;
}

int ActionGrid::insignificant_target(int action) {
  if (action < 0 || action >= size()) {
    throw std::invalid_argument(fmt::format("action index {} out of [0, {})",
                                            action, size()));
  }
  return (action % kVerbosityLevels) * kVerbosityTokens;
}

int ActionGrid::action_index(int significant_level, int verbosity_level) {
  if (significant_level < 0 || significant_level >= kSignificantLevels) {
    throw std::invalid_argument(
        fmt::format("significant level {} out of [0, {})", significant_level,
                    kSignificantLevels));
  }
  if (verbosity_level < 0 || verbosity_level >= kVerbosityLevels) {
    throw std::invalid_argument(fmt::format("verbosity level {} out of [0, {})",
                                            verbosity_level, kVerbosityLevels));
  }
  return significant_level * kVerbosityLevels + verbosity_level;
}

void validate(const SynthTask& task) {
  validate(task.curve);
  if (task.difficulty < 0.0 || task.difficulty >= 1.0) {
    throw ConfigError(
        fmt::format("difficulty must be in [0, 1), got {}", task.difficulty));
  }
  if (task.verbosity_noise < 0.0 || !std::isfinite(task.verbosity_noise)) {
    throw ConfigError(fmt::format("verbosity noise must be >= 0, got {}",
                                  task.verbosity_noise));
  }
}

double success_probability(const SynthTask& task, double significant_length) {
  const double p =
      (1.0 - task.difficulty) * eval_curve(task.curve, significant_length);
  return std::clamp(p, 0.0, 1.0);
}

EpisodeOutcome rollout_outcome(const SynthTask& task, int action,
                               std::uint64_t episode) {
  validate(task);
  const int sig_target = ActionGrid::significant_target(action);
  const int insig_target = ActionGrid::insignificant_target(action);

  std::mt19937_64 eng(derive_seed(task.seed, Stream::kStreamEnv, episode));

  EpisodeOutcome outcome;
  outcome.significant = sig_target;
  outcome.correct =
      canonical(eng) < success_probability(task, static_cast<double>(sig_target));
  outcome.insignificant = insig_target;
  if (task.verbosity_noise > 0.0) {
    const double jitter = task.verbosity_noise * gaussian(eng);
    outcome.insignificant = std::max(
        0, static_cast<int>(std::lround(static_cast<double>(insig_target) + jitter)));
  }
  return outcome;
}

EpisodeResult rollout(const SynthTask& task, int action, std::uint64_t episode) {
  const EpisodeOutcome outcome = rollout_outcome(task, action, episode);
  const int sig_target = outcome.significant;
  const int insignificant = outcome.insignificant;
  const bool correct = outcome.correct;

  EpisodeResult result;
  result.significant = sig_target;
  result.insignificant = insignificant;
  result.action = action;
  result.trace.prompt_id = fmt::format("task-{}-ep-{}", task.seed, episode);
  result.trace.correct = correct;
  result.trace.tokens.reserve(static_cast<std::size_t>(sig_target) +
                              static_cast<std::size_t>(insignificant));

  // Interleave the two token kinds evenly (Bresenham-style merge) so the
  // rendered trace alternates rather than emitting two homogeneous runs.
  const int total = sig_target + insignificant;
  int sig_emitted = 0;
  int insig_emitted = 0;
  long long err = 0;  // >0 means significant tokens are behind schedule
  for (int i = 0; i < total; ++i) {
    bool emit_sig;
    if (sig_emitted == sig_target) {
      emit_sig = false;
    } else if (insig_emitted == insignificant) {
      emit_sig = true;
    } else {
      err += sig_target;
      emit_sig = err >= total;
      if (emit_sig) err -= total;
    }
    Token token;
    if (emit_sig) {
      token.text = std::string(
          kSignificantVocab[static_cast<std::size_t>(sig_emitted) %
                            kSignificantVocab.size()]);
      token.score = kSignificantScore;
      ++sig_emitted;
    } else {
      token.text = std::string(
          kInsignificantVocab[static_cast<std::size_t>(insig_emitted) %
                              kInsignificantVocab.size()]);
      token.score = kInsignificantScore;
      ++insig_emitted;
    }
    result.trace.tokens.push_back(std::move(token));
  }
  return result;
}

}  // namespace bingo
