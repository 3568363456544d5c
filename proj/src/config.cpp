#include "config.hpp"

#include <charconv>
#include <climits>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string_view>

#include <fmt/core.h>

#include "errors.hpp"

namespace bingo {

namespace {

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r");
  return std::string(text.substr(first, last - first + 1));
}

[[noreturn]] void fail(const std::string& path, int line, const std::string& what) {
  throw ConfigError(fmt::format("{}:{}: {}", path, line, what));
}

template <typename T>
T parse_number(const std::string& path, int line, const std::string& key,
               const std::string& value) {
  T parsed{};
  const char* begin = value.data();
  const char* end = begin + value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, parsed);
  if (ec != std::errc() || ptr != end || value.empty()) {
    fail(path, line, fmt::format("key '{}' has malformed value '{}'", key, value));
  }
  return parsed;
}

bool parse_bool(const std::string& path, int line, const std::string& key,
                const std::string& value) {
  if (value == "true") return true;
  if (value == "false") return false;
  fail(path, line,
       fmt::format("key '{}' must be true or false, got '{}'", key, value));
}

CurveShape parse_shape(const std::string& path, int line, const std::string& value) {
  if (value == "exponential") return CurveShape::kExponentialSaturation;
  if (value == "logistic") return CurveShape::kLogistic;
  fail(path, line,
       fmt::format("curve_shape must be exponential or logistic, got '{}'", value));
}

RefSource parse_ref_source(const std::string& path, int line,
                           const std::string& value) {
  if (value == "fixed") return RefSource::kFixedConstant;
  if (value == "frozen-baseline") return RefSource::kFrozenBaselineMean;
  if (value == "per-batch") return RefSource::kPerBatchMean;
  fail(path, line,
       fmt::format("reference_source must be fixed, frozen-baseline, or "
                   "per-batch, got '{}'",
                   value));
}

AccuracyScale parse_scale(const std::string& path, int line,
                          const std::string& value) {
  if (value == "percent") return AccuracyScale::kPercent;
  if (value == "fraction") return AccuracyScale::kFraction;
  fail(path, line,
       fmt::format("accuracy_scale must be percent or fraction, got '{}'", value));
}

const char* shape_name(CurveShape shape) {
  return shape == CurveShape::kExponentialSaturation ? "exponential" : "logistic";
}

const char* ref_source_name(RefSource source) {
  switch (source) {
    case RefSource::kFixedConstant: return "fixed";
    case RefSource::kFrozenBaselineMean: return "frozen-baseline";
    case RefSource::kPerBatchMean: return "per-batch";
  }
  return "unknown";
}

const char* scale_name(AccuracyScale scale) {
  return scale == AccuracyScale::kPercent ? "percent" : "fraction";
}

void apply_key(ExperimentConfig& config, const std::string& section,
               const std::string& key, const std::string& value,
               const std::string& path, int line) {
  auto number = [&](auto& field) {
    field = parse_number<std::decay_t<decltype(field)>>(path, line, key, value);
  };
  if (section == "reward") {
    if (key == "tau") return number(config.reward.tau);
    if (key == "lambda_correct") return number(config.reward.lambda_correct);
    if (key == "lambda_wrong_insig") return number(config.reward.lambda_wrong_insig);
    if (key == "lambda_wrong_sig") return number(config.reward.lambda_wrong_sig);
    if (key == "alpha") return number(config.reward.alpha);
    if (key == "static_length_coeff") {
      return number(config.reward.static_length_coeff);
    }
    if (key == "reference_source") {
      config.reference.source = parse_ref_source(path, line, value);
      return;
    }
    if (key == "reference_significant") {
      return number(config.reference.fixed_significant);
    }
    if (key == "reference_insignificant") {
      return number(config.reference.fixed_insignificant);
    }
  } else if (section == "scheduler") {
    if (key == "slope_start_step") return number(config.scheduler.slope_start_step);
    if (key == "slope_period") return number(config.scheduler.slope_period);
    if (key == "beta") return number(config.scheduler.beta);
    if (key == "accuracy_scale") {
      config.accuracy_scale = parse_scale(path, line, value);
      return;
    }
  } else if (section == "environment") {
    if (key == "a_max") return number(config.task.curve.a_max);
    if (key == "saturation_length") return number(config.task.curve.l_star);
    if (key == "curve_shape") {
      config.task.curve.shape = parse_shape(path, line, value);
      return;
    }
    if (key == "shape_param") return number(config.task.curve.shape_param);
    if (key == "difficulty") return number(config.task.difficulty);
    if (key == "verbosity_noise") return number(config.task.verbosity_noise);
  } else if (section == "ppo") {
    if (key == "rollouts_per_update") return number(config.ppo.rollouts_per_update);
    if (key == "minibatch_size") return number(config.ppo.minibatch_size);
    if (key == "epochs_per_update") return number(config.ppo.epochs_per_update);
    if (key == "actor_lr") return number(config.ppo.actor_lr);
    if (key == "critic_lr") return number(config.ppo.critic_lr);
    if (key == "clip_epsilon") return number(config.ppo.clip_epsilon);
    if (key == "kl_coeff") return number(config.ppo.kl_coeff);
    if (key == "grad_clip_norm") return number(config.ppo.grad_clip_norm);
    if (key == "gamma") return number(config.ppo.gamma);
    if (key == "gae_lambda") return number(config.ppo.gae_lambda);
    if (key == "normalize_advantages") {
      config.ppo.normalize_advantages = parse_bool(path, line, key, value);
      return;
    }
    if (key == "reference_rollouts") return number(config.ppo.reference_rollouts);
    if (key == "eval_rollouts") return number(config.ppo.eval_rollouts);
  } else if (section == "metrics") {
    if (key == "l_max") return number(config.l_max);
  } else if (section == "run") {
    if (key == "seed") return number(config.seed);
    if (key == "updates") return number(config.updates);
    if (key == "out_dir") {
      if (value.empty()) fail(path, line, "out_dir must not be empty");
      config.out_dir = value;
      return;
    }
  }
  fail(path, line, fmt::format("unknown key '{}' in section [{}]", key, section));
}

}  // namespace

ExperimentConfig default_config() { return ExperimentConfig{}; }

void validate(const ExperimentConfig& config) {
  validate(config.reward);
  validate(config.scheduler);
  validate(config.task);
  validate(config.ppo);
  if (!(config.l_max > 0.0)) {
    throw ConfigError(fmt::format("l_max must be positive, got {}", config.l_max));
  }
  if (config.updates < 1) {
    throw ConfigError(fmt::format("updates must be >= 1, got {}", config.updates));
  }
  if (config.out_dir.empty()) {
    throw ConfigError("out_dir must not be empty");
  }
  if (config.reference.source == RefSource::kFixedConstant) {
    ReferenceStats fixed;
    fixed.ref_significant = config.reference.fixed_significant;
    fixed.ref_insignificant = config.reference.fixed_insignificant;
    fixed.source = RefSource::kFixedConstant;
    validate_reference(fixed);
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open config '{}'", path));

  static const std::set<std::string> kSections = {
      "reward", "scheduler", "environment", "ppo", "metrics", "run"};

  ExperimentConfig config;
  std::string section;
  std::set<std::string> seen;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(path, line_no, "unterminated section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (kSections.find(section) == kSections.end()) {
        fail(path, line_no, fmt::format("unknown section [{}]", section));
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(path, line_no, fmt::format("expected 'key = value', got '{}'", line));
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) fail(path, line_no, "empty key");
    if (section.empty()) {
      fail(path, line_no, fmt::format("key '{}' appears before any section", key));
    }
    if (!seen.insert(section + "." + key).second) {
      fail(path, line_no, fmt::format("duplicate key '{}' in [{}]", key, section));
    }
    apply_key(config, section, key, value, path, line_no);
  }

  // One phase threshold and one seed per run.
  config.reward.beta = config.scheduler.beta;
  config.task.seed = config.seed;
  validate(config);
  return config;
}

std::string config_to_ini(const ExperimentConfig& config) {
  std::ostringstream out;
  out << "[reward]\n";
  out << fmt::format("tau = {}\n", config.reward.tau);
  out << fmt::format("lambda_correct = {}\n", config.reward.lambda_correct);
  out << fmt::format("lambda_wrong_insig = {}\n", config.reward.lambda_wrong_insig);
  out << fmt::format("lambda_wrong_sig = {}\n", config.reward.lambda_wrong_sig);
  out << fmt::format("alpha = {}\n", config.reward.alpha);
  out << fmt::format("static_length_coeff = {}\n", config.reward.static_length_coeff);
  out << fmt::format("reference_source = {}\n",
                     ref_source_name(config.reference.source));
  out << fmt::format("reference_significant = {}\n",
                     config.reference.fixed_significant);
  out << fmt::format("reference_insignificant = {}\n",
                     config.reference.fixed_insignificant);
  out << "\n[scheduler]\n";
  out << fmt::format("slope_start_step = {}\n", config.scheduler.slope_start_step);
  out << fmt::format("slope_period = {}\n", config.scheduler.slope_period);
  out << fmt::format("beta = {}\n", config.scheduler.beta);
  out << fmt::format("accuracy_scale = {}\n", scale_name(config.accuracy_scale));
  out << "\n[environment]\n";
  out << fmt::format("a_max = {}\n", config.task.curve.a_max);
  out << fmt::format("saturation_length = {}\n", config.task.curve.l_star);
  out << fmt::format("curve_shape = {}\n", shape_name(config.task.curve.shape));
  out << fmt::format("shape_param = {}\n", config.task.curve.shape_param);
  out << fmt::format("difficulty = {}\n", config.task.difficulty);
  out << fmt::format("verbosity_noise = {}\n", config.task.verbosity_noise);
  out << "\n[ppo]\n";
  out << fmt::format("rollouts_per_update = {}\n", config.ppo.rollouts_per_update);
  out << fmt::format("minibatch_size = {}\n", config.ppo.minibatch_size);
  out << fmt::format("epochs_per_update = {}\n", config.ppo.epochs_per_update);
  out << fmt::format("actor_lr = {}\n", config.ppo.actor_lr);
  out << fmt::format("critic_lr = {}\n", config.ppo.critic_lr);
  out << fmt::format("clip_epsilon = {}\n", config.ppo.clip_epsilon);
  out << fmt::format("kl_coeff = {}\n", config.ppo.kl_coeff);
  out << fmt::format("grad_clip_norm = {}\n", config.ppo.grad_clip_norm);
  out << fmt::format("gamma = {}\n", config.ppo.gamma);
  out << fmt::format("gae_lambda = {}\n", config.ppo.gae_lambda);
  out << fmt::format("normalize_advantages = {}\n",
                     config.ppo.normalize_advantages ? "true" : "false");
  out << fmt::format("reference_rollouts = {}\n", config.ppo.reference_rollouts);
  out << fmt::format("eval_rollouts = {}\n", config.ppo.eval_rollouts);
  out << "\n[metrics]\n";
  out << fmt::format("l_max = {}\n", config.l_max);
  out << "\n[run]\n";
  out << fmt::format("seed = {}\n", config.seed);
  out << fmt::format("updates = {}\n", config.updates);
  out << fmt::format("out_dir = {}\n", config.out_dir);
  return out.str();
}

void write_config_ini(const std::string& path, const ExperimentConfig& config) {
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path));
  out << config_to_ini(config);
  out.flush();
  if (!out.good()) throw IoError(fmt::format("failed writing '{}'", path));
}

double config_value(const ExperimentConfig& config, const std::string& key) {
  if (key == "reward.tau") return config.reward.tau;
  if (key == "reward.lambda_correct") return config.reward.lambda_correct;
  if (key == "reward.lambda_wrong_insig") return config.reward.lambda_wrong_insig;
  if (key == "reward.lambda_wrong_sig") return config.reward.lambda_wrong_sig;
  if (key == "reward.alpha") return config.reward.alpha;
  if (key == "reward.beta") return config.reward.beta;
  if (key == "reward.static_length_coeff") return config.reward.static_length_coeff;
  if (key == "reward.reference_significant") return config.reference.fixed_significant;
  if (key == "reward.reference_insignificant") {
    return config.reference.fixed_insignificant;
  }
  if (key == "scheduler.slope_start_step") return config.scheduler.slope_start_step;
  if (key == "scheduler.slope_period") return config.scheduler.slope_period;
  if (key == "scheduler.beta") return config.scheduler.beta;
  if (key == "environment.a_max") return config.task.curve.a_max;
  if (key == "environment.saturation_length") return config.task.curve.l_star;
  if (key == "environment.shape_param") return config.task.curve.shape_param;
  if (key == "environment.difficulty") return config.task.difficulty;
  if (key == "environment.verbosity_noise") return config.task.verbosity_noise;
  if (key == "ppo.rollouts_per_update") return config.ppo.rollouts_per_update;
  if (key == "ppo.minibatch_size") return config.ppo.minibatch_size;
  if (key == "ppo.epochs_per_update") return config.ppo.epochs_per_update;
  if (key == "ppo.actor_lr") return config.ppo.actor_lr;
  if (key == "ppo.critic_lr") return config.ppo.critic_lr;
  if (key == "ppo.clip_epsilon") return config.ppo.clip_epsilon;
  if (key == "ppo.kl_coeff") return config.ppo.kl_coeff;
  if (key == "ppo.grad_clip_norm") return config.ppo.grad_clip_norm;
  if (key == "ppo.gamma") return config.ppo.gamma;
  if (key == "ppo.gae_lambda") return config.ppo.gae_lambda;
  if (key == "ppo.normalize_advantages") {
    return config.ppo.normalize_advantages ? 1.0 : 0.0;
  }
  if (key == "ppo.reference_rollouts") return config.ppo.reference_rollouts;
  if (key == "ppo.eval_rollouts") return config.ppo.eval_rollouts;
  if (key == "metrics.l_max") return config.l_max;
  if (key == "run.seed") return static_cast<double>(config.seed);
  if (key == "run.updates") return config.updates;
  throw ConfigError(fmt::format("unknown or non-numeric config key '{}'", key));
}

namespace {

int to_int_field(const std::string& key, double value) {
  if (!(value >= INT_MIN && value <= INT_MAX) || value != std::floor(value)) {
    throw ConfigError(
        fmt::format("key '{}' needs an integer value, got {}", key, value));
  }
  return static_cast<int>(value);
}

bool to_bool_field(const std::string& key, double value) {
  if (value == 0.0) return false;
  if (value == 1.0) return true;
  throw ConfigError(fmt::format("key '{}' needs 0 or 1, got {}", key, value));
}

}  // namespace

void config_set_value(ExperimentConfig& config, const std::string& key,
                      double value) {
  if (key == "reward.tau") {
    config.reward.tau = value;
  } else if (key == "reward.lambda_correct") {
    config.reward.lambda_correct = value;
  } else if (key == "reward.lambda_wrong_insig") {
    config.reward.lambda_wrong_insig = value;
  } else if (key == "reward.lambda_wrong_sig") {
    config.reward.lambda_wrong_sig = value;
  } else if (key == "reward.alpha") {
    config.reward.alpha = value;
  } else if (key == "reward.beta" || key == "scheduler.beta") {
    config.reward.beta = value;
    config.scheduler.beta = value;
  } else if (key == "reward.static_length_coeff") {
    config.reward.static_length_coeff = value;
  } else if (key == "reward.reference_significant") {
    config.reference.fixed_significant = value;
  } else if (key == "reward.reference_insignificant") {
    config.reference.fixed_insignificant = value;
  } else if (key == "scheduler.slope_start_step") {
    config.scheduler.slope_start_step = to_int_field(key, value);
  } else if (key == "scheduler.slope_period") {
    config.scheduler.slope_period = to_int_field(key, value);
  } else if (key == "environment.a_max") {
    config.task.curve.a_max = value;
  } else if (key == "environment.saturation_length") {
    config.task.curve.l_star = value;
  } else if (key == "environment.shape_param") {
    config.task.curve.shape_param = value;
  } else if (key == "environment.difficulty") {
    config.task.difficulty = value;
  } else if (key == "environment.verbosity_noise") {
    config.task.verbosity_noise = value;
  } else if (key == "ppo.rollouts_per_update") {
    config.ppo.rollouts_per_update = to_int_field(key, value);
  } else if (key == "ppo.minibatch_size") {
    config.ppo.minibatch_size = to_int_field(key, value);
  } else if (key == "ppo.epochs_per_update") {
    config.ppo.epochs_per_update = to_int_field(key, value);
  } else if (key == "ppo.actor_lr") {
    config.ppo.actor_lr = value;
  } else if (key == "ppo.critic_lr") {
    config.ppo.critic_lr = value;
  } else if (key == "ppo.clip_epsilon") {
    config.ppo.clip_epsilon = value;
  } else if (key == "ppo.kl_coeff") {
    config.ppo.kl_coeff = value;
  } else if (key == "ppo.grad_clip_norm") {
    config.ppo.grad_clip_norm = value;
  } else if (key == "ppo.gamma") {
    config.ppo.gamma = value;
  } else if (key == "ppo.gae_lambda") {
    config.ppo.gae_lambda = value;
  } else if (key == "ppo.normalize_advantages") {
    config.ppo.normalize_advantages = to_bool_field(key, value);
  } else if (key == "ppo.reference_rollouts") {
    config.ppo.reference_rollouts = to_int_field(key, value);
  } else if (key == "ppo.eval_rollouts") {
    config.ppo.eval_rollouts = to_int_field(key, value);
  } else if (key == "metrics.l_max") {
    config.l_max = value;
  } else if (key == "run.seed") {
    if (value < 0.0 || value != std::floor(value) || value > 9.007199254740992e15) {
      throw ConfigError(fmt::format(
          "key 'run.seed' needs a nonnegative integer below 2^53, got {}", value));
    }
    config.seed = static_cast<std::uint64_t>(value);
    config.task.seed = config.seed;
  } else if (key == "run.updates") {
    config.updates = to_int_field(key, value);
  } else {
    throw ConfigError(fmt::format("unknown or non-numeric config key '{}'", key));
  }
  validate(config);
}

TrainSpec to_train_spec(const ExperimentConfig& config, RewardKind kind) {
  TrainSpec spec;
  spec.task = config.task;
  spec.task.seed = config.seed;
  spec.ppo = config.ppo;
  spec.reward = config.reward;
  spec.reward.beta = config.scheduler.beta;
  spec.scheduler = config.scheduler;
  spec.reference = config.reference;
  spec.reward_kind = kind;
  spec.accuracy_scale = config.accuracy_scale;
  spec.updates = config.updates;
  spec.seed = config.seed;
  spec.l_max = config.l_max;
  return spec;
}

}  // namespace bingo
