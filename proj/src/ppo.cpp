#include "ppo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <fmt/core.h>

#include "errors.hpp"
#include "rng.hpp"

namespace bingo {

namespace {

/// Draw one action index from a categorical distribution (CDF walk).
int sample_action(std::mt19937_64& eng, const std::vector<double>& probs) {
  const double u = canonical(eng);
  double cum = 0.0;
  for (std::size_t a = 0; a < probs.size(); ++a) {
    cum += probs[a];
    if (u < cum) return static_cast<int>(a);
  }
  return static_cast<int>(probs.size()) - 1;  // guard rounding in the tail
}

int uniform_action(std::mt19937_64& eng, int n) {
  const int a = static_cast<int>(canonical(eng) * static_cast<double>(n));
  return std::min(a, n - 1);
}

/// Deterministic Fisher-Yates; std::shuffle's draw sequence is
/// implementation-defined, which would break cross-platform replays.
void shuffle_indices(std::vector<int>& indices, std::mt19937_64& eng) {
  for (std::size_t i = indices.size(); i > 1; --i) {
    const auto j = std::min<std::size_t>(
        static_cast<std::size_t>(canonical(eng) * static_cast<double>(i)), i - 1);
    std::swap(indices[i - 1], indices[j]);
  }
}

double l2_norm(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

}  // namespace

const char* reward_kind_name(RewardKind kind) {
  switch (kind) {
    case RewardKind::kBingo: return "bingo";
    case RewardKind::kVanilla: return "vanilla";
    case RewardKind::kStaticLength: return "static-length";
    case RewardKind::kSigOnly: return "sig-only";
  }
  return "unknown";
}

RewardKind parse_reward_kind(const std::string& name) {
  if (name == "bingo") return RewardKind::kBingo;
  if (name == "vanilla") return RewardKind::kVanilla;
  if (name == "static-length") return RewardKind::kStaticLength;
  if (name == "sig-only") return RewardKind::kSigOnly;
  throw ConfigError(fmt::format(
      "unknown reward kind '{}' (expected bingo, vanilla, static-length, or "
      "sig-only)",
      name));
}

void validate(const PpoConfig& config) {
  if (config.rollouts_per_update < 1) {
    throw ConfigError(fmt::format("rollouts_per_update must be >= 1, got {}",
                                  config.rollouts_per_update));
  }
  if (config.minibatch_size < 1) {
    throw ConfigError(fmt::format("minibatch_size must be >= 1, got {}",
                                  config.minibatch_size));
  }
  if (config.epochs_per_update < 1) {
    throw ConfigError(fmt::format("epochs_per_update must be >= 1, got {}",
                                  config.epochs_per_update));
  }
  if (!(config.actor_lr > 0.0) || !std::isfinite(config.actor_lr)) {
    throw ConfigError(
        fmt::format("actor_lr must be positive and finite, got {}", config.actor_lr));
  }
  if (!(config.critic_lr > 0.0) || !std::isfinite(config.critic_lr)) {
    throw ConfigError(fmt::format("critic_lr must be positive and finite, got {}",
                                  config.critic_lr));
  }
  if (!(config.clip_epsilon > 0.0 && config.clip_epsilon < 1.0)) {
    throw ConfigError(fmt::format("clip_epsilon must lie in (0, 1), got {}",
                                  config.clip_epsilon));
  }
  if (config.kl_coeff < 0.0 || !std::isfinite(config.kl_coeff)) {
    throw ConfigError(
        fmt::format("kl_coeff must be >= 0 and finite, got {}", config.kl_coeff));
  }
  if (!(config.grad_clip_norm > 0.0) || !std::isfinite(config.grad_clip_norm)) {
    throw ConfigError(fmt::format("grad_clip_norm must be positive, got {}",
                                  config.grad_clip_norm));
  }
  if (!(config.gamma > 0.0 && config.gamma <= 1.0)) {
    throw ConfigError(
        fmt::format("gamma must lie in (0, 1], got {}", config.gamma));
  }
  if (config.gae_lambda < 0.0 || config.gae_lambda > 1.0) {
    throw ConfigError(
        fmt::format("gae_lambda must lie in [0, 1], got {}", config.gae_lambda));
  }
  if (config.reference_rollouts < 1) {
    throw ConfigError(fmt::format("reference_rollouts must be >= 1, got {}",
                                  config.reference_rollouts));
  }
  if (config.eval_rollouts < 1) {
    throw ConfigError(fmt::format("eval_rollouts must be >= 1, got {}",
                                  config.eval_rollouts));
  }
}

void validate(const TrainSpec& spec) {
  validate(spec.task);
  validate(spec.ppo);
  validate(spec.reward);
  if (spec.updates < 1) {
    throw ConfigError(fmt::format("updates must be >= 1, got {}", spec.updates));
  }
  if (!(spec.l_max > 0.0)) {
    throw ConfigError(fmt::format("l_max must be positive, got {}", spec.l_max));
  }
  if (spec.reference.source == RefSource::kFixedConstant) {
    ReferenceStats fixed;
    fixed.ref_significant = spec.reference.fixed_significant;
    fixed.ref_insignificant = spec.reference.fixed_insignificant;
    fixed.source = RefSource::kFixedConstant;
    validate_reference(fixed);
  }
}

std::vector<double> gae(const std::vector<double>& rewards,
                        const std::vector<double>& values, double gamma,
                        double lambda) {
  if (rewards.empty() || rewards.size() != values.size()) {
    throw std::invalid_argument(
        fmt::format("rewards and values must be non-empty and equal-length "
                    "(got {} and {})",
                    rewards.size(), values.size()));
  }
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument(fmt::format("gamma must lie in (0, 1], got {}", gamma));
  }
  if (lambda < 0.0 || lambda > 1.0) {
    throw std::invalid_argument(
        fmt::format("lambda must lie in [0, 1], got {}", lambda));
  }
  const std::size_t horizon = rewards.size();
  std::vector<double> advantages(horizon, 0.0);
  double next_advantage = 0.0;
  double next_value = 0.0;  // terminal bootstrap
  for (std::size_t i = horizon; i > 0; --i) {
    const std::size_t t = i - 1;
    const double delta = rewards[t] + gamma * next_value - values[t];
    advantages[t] = delta + gamma * lambda * next_advantage;
    next_advantage = advantages[t];
    next_value = values[t];
  }
  return advantages;
}

double clipped_surrogate(double ratio, double advantage, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument(
        fmt::format("epsilon must lie in (0, 1), got {}", epsilon));
  }
  const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
  return std::min(ratio * advantage, clipped * advantage);
}

double surrogate_gradient(double ratio, double advantage, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument(
        fmt::format("epsilon must lie in (0, 1), got {}", epsilon));
  }
  const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
  // min() picks the unclipped branch on ties, so mirror that here.
  return ratio * advantage <= clipped * advantage ? advantage : 0.0;
}

std::vector<double> softmax(const std::vector<double>& logits) {
  if (logits.empty()) throw std::invalid_argument("softmax of an empty vector");
  const double peak = *std::max_element(logits.begin(), logits.end());
  std::vector<double> probs(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    probs[i] = std::exp(logits[i] - peak);
    sum += probs[i];
  }
  for (double& p : probs) p /= sum;
  return probs;
}

std::vector<double> log_softmax(const std::vector<double>& logits) {
  if (logits.empty()) throw std::invalid_argument("log_softmax of an empty vector");
  const double peak = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double z : logits) sum += std::exp(z - peak);
  const double log_z = std::log(sum) + peak;
  std::vector<double> logp(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) logp[i] = logits[i] - log_z;
  return logp;
}

TrainResult train(const TrainSpec& spec) {
  validate(spec);
  const int n_actions = ActionGrid::size();
  const PpoConfig& ppo_cfg = spec.ppo;
  const int batch = ppo_cfg.rollouts_per_update;

  std::mt19937_64 policy_eng(derive_seed(spec.seed, Stream::kStreamPolicy, 0));
  std::mt19937_64 reference_eng(derive_seed(spec.seed, Stream::kStreamReference, 0));
  std::mt19937_64 eval_eng(derive_seed(spec.seed, Stream::kStreamEval, 0));
  std::mt19937_64 shuffle_eng(derive_seed(spec.seed, Stream::kStreamShuffle, 0));
  std::uint64_t episode = 0;  // one shared counter keeps env draws disjoint

  TrainResult result;
  result.scheduler = SchedulerState(spec.scheduler);

  // Reference lengths the ratio rewards normalise against.
  ReferenceStats ref;
  ref.source = spec.reference.source;
  switch (spec.reference.source) {
    case RefSource::kFixedConstant:
      ref.ref_significant = spec.reference.fixed_significant;
      ref.ref_insignificant = spec.reference.fixed_insignificant;
      break;
    case RefSource::kFrozenBaselineMean: {
      // Uniform-policy pre-pass: the mean lengths of an unshaped policy.
      double sum_sig = 0.0;
      double sum_insig = 0.0;
      for (int i = 0; i < ppo_cfg.reference_rollouts; ++i) {
        const int action = uniform_action(reference_eng, n_actions);
        const EpisodeOutcome out = rollout_outcome(spec.task, action, episode++);
        sum_sig += out.significant;
        sum_insig += out.insignificant;
      }
      const double n = static_cast<double>(ppo_cfg.reference_rollouts);
      ref.ref_significant = sum_sig / n;
      ref.ref_insignificant = sum_insig / n;
      break;
    }
    case RefSource::kPerBatchMean:
      ref.ref_significant = 1.0;  // replaced before first use
      ref.ref_insignificant = 1.0;
      break;
  }
  if (ref.ref_significant <= 0.0) ref.ref_significant = 1.0;
  if (ref.ref_insignificant <= 0.0) ref.ref_insignificant = 1.0;
  result.reference = ref;

  std::vector<double> theta(static_cast<std::size_t>(n_actions), 0.0);
  double baseline = 0.0;

  std::vector<int> actions(static_cast<std::size_t>(batch));
  std::vector<EpisodeOutcome> outcomes(static_cast<std::size_t>(batch));
  std::vector<double> rewards(static_cast<std::size_t>(batch));
  std::vector<double> advantages(static_cast<std::size_t>(batch));
  std::vector<double> old_logp(static_cast<std::size_t>(batch));
  std::vector<int> order(static_cast<std::size_t>(batch));
  std::vector<double> grad(static_cast<std::size_t>(n_actions));
  std::vector<double> weight_sums(static_cast<std::size_t>(n_actions));

  const bool full_batch = ppo_cfg.minibatch_size >= batch;
  result.log.reserve(static_cast<std::size_t>(spec.updates));

  for (int step = 1; step <= spec.updates; ++step) {
    const std::vector<double> pi_old = softmax(theta);
    const std::vector<double> logp_start = log_softmax(theta);

    // --- collect one batch of single-step episodes
    int n_correct = 0;
    double sum_sig = 0.0;
    double sum_insig = 0.0;
    for (int i = 0; i < batch; ++i) {
      const int action = sample_action(policy_eng, pi_old);
      actions[static_cast<std::size_t>(i)] = action;
      const EpisodeOutcome out = rollout_outcome(spec.task, action, episode++);
      outcomes[static_cast<std::size_t>(i)] = out;
      n_correct += out.correct ? 1 : 0;
      sum_sig += out.significant;
      sum_insig += out.insignificant;
    }
    const double accuracy = static_cast<double>(n_correct) / batch;
    const double accuracy_pp = 100.0 * accuracy;

    // --- scheduler sees this batch before its reward is computed
    result.scheduler.record_accuracy(
        step, spec.accuracy_scale == AccuracyScale::kPercent ? accuracy_pp
                                                             : accuracy);
    const double slope = result.scheduler.slope();
    const int decay = result.scheduler.decay_counter();

    if (spec.reference.source == RefSource::kPerBatchMean) {
      ref.ref_significant = sum_sig > 0.0 ? sum_sig / batch : 1.0;
      ref.ref_insignificant = sum_insig > 0.0 ? sum_insig / batch : 1.0;
    }

    // --- rewards
    double reward_sum = 0.0;
    for (int i = 0; i < batch; ++i) {
      const EpisodeOutcome& out = outcomes[static_cast<std::size_t>(i)];
      double r = 0.0;
      switch (spec.reward_kind) {
        case RewardKind::kBingo: {
          SignificanceCounts counts;
          counts.significant = static_cast<std::size_t>(out.significant);
          counts.insignificant = static_cast<std::size_t>(out.insignificant);
          counts.threshold = spec.reward.tau;
          r = bingo_reward(counts, out.correct, ref, spec.reward, slope, decay)
                  .total;
          break;
        }
        case RewardKind::kVanilla:
          r = out.correct ? 1.0 : 0.0;
          break;
        case RewardKind::kStaticLength:
          r = (out.correct ? 1.0 : 0.0) -
              spec.reward.static_length_coeff *
                  static_cast<double>(out.significant + out.insignificant);
          break;
        case RewardKind::kSigOnly:
          r = (out.correct ? 1.0 : 0.0) -
              spec.reward.static_length_coeff * static_cast<double>(out.insignificant);
          break;
      }
      if (!std::isfinite(r)) {
        throw Error(fmt::format(
            "non-finite reward {} at update {} (sample {}, L_s={}, L_is={}); "
            "check alpha and the reference lengths",
            r, step, i, out.significant, out.insignificant));
      }
      rewards[static_cast<std::size_t>(i)] = r;
      reward_sum += r;
    }
    const double reward_mean = reward_sum / batch;

    // --- advantages against the scalar baseline (one-step episodes, so this
    // is exactly the generalised advantage recursion with horizon one)
    double adv_mean = 0.0;
    for (int i = 0; i < batch; ++i) {
      advantages[static_cast<std::size_t>(i)] =
          rewards[static_cast<std::size_t>(i)] - baseline;
      adv_mean += advantages[static_cast<std::size_t>(i)];
    }
    adv_mean /= batch;
    if (ppo_cfg.normalize_advantages) {
      double var = 0.0;
      for (int i = 0; i < batch; ++i) {
        const double d = advantages[static_cast<std::size_t>(i)] - adv_mean;
        var += d * d;
      }
      const double stddev = std::sqrt(var / batch);
      for (int i = 0; i < batch; ++i) {
        advantages[static_cast<std::size_t>(i)] =
            (advantages[static_cast<std::size_t>(i)] - adv_mean) / (stddev + 1e-8);
      }
    }

    for (int i = 0; i < batch; ++i) {
      old_logp[static_cast<std::size_t>(i)] =
          logp_start[static_cast<std::size_t>(
              actions[static_cast<std::size_t>(i)])];
    }

    // --- clipped-ratio epochs
    for (int i = 0; i < batch; ++i) order[static_cast<std::size_t>(i)] = i;
    for (int epoch = 0; epoch < ppo_cfg.epochs_per_update; ++epoch) {
      if (!full_batch) shuffle_indices(order, shuffle_eng);
      for (int start = 0; start < batch; start += ppo_cfg.minibatch_size) {
        const int stop = std::min(batch, start + ppo_cfg.minibatch_size);
        const int chunk = stop - start;
        const std::vector<double> pi_cur = softmax(theta);
        const std::vector<double> logp_cur = log_softmax(theta);

        std::fill(weight_sums.begin(), weight_sums.end(), 0.0);
        double weight_total = 0.0;
        for (int p = start; p < stop; ++p) {
          const int i = order[static_cast<std::size_t>(p)];
          const int action = actions[static_cast<std::size_t>(i)];
          const double ratio =
              std::exp(logp_cur[static_cast<std::size_t>(action)] -
                       old_logp[static_cast<std::size_t>(i)]);
          if (epoch == 0 && start == 0) {
            result.max_first_epoch_ratio_deviation =
                std::max(result.max_first_epoch_ratio_deviation,
                         std::abs(ratio - 1.0));
          }
          const double adv = advantages[static_cast<std::size_t>(i)];
          // Zero where the clip is active; the advantage elsewhere.
          const double dsurr =
              surrogate_gradient(ratio, adv, ppo_cfg.clip_epsilon);
          const double w = dsurr * ratio;
          weight_sums[static_cast<std::size_t>(action)] += w;
          weight_total += w;
        }

        const double inv_chunk = 1.0 / chunk;
        for (int a = 0; a < n_actions; ++a) {
          grad[static_cast<std::size_t>(a)] =
              weight_sums[static_cast<std::size_t>(a)] * inv_chunk -
              weight_total * inv_chunk * pi_cur[static_cast<std::size_t>(a)] -
              ppo_cfg.kl_coeff * (pi_cur[static_cast<std::size_t>(a)] -
                                  pi_old[static_cast<std::size_t>(a)]);
        }
        const double norm = l2_norm(grad);
        const double scale =
            norm > ppo_cfg.grad_clip_norm ? ppo_cfg.grad_clip_norm / norm : 1.0;
        for (int a = 0; a < n_actions; ++a) {
          theta[static_cast<std::size_t>(a)] +=
              ppo_cfg.actor_lr * scale * grad[static_cast<std::size_t>(a)];
        }
      }
      for (int a = 0; a < n_actions; ++a) {
        if (!std::isfinite(theta[static_cast<std::size_t>(a)])) {
          throw Error(fmt::format(
              "non-finite policy parameter (action {}) after update {} epoch "
              "{}; reduce actor_lr or tighten grad_clip_norm",
              a, step, epoch));
        }
      }
    }

    baseline += ppo_cfg.critic_lr * (reward_mean - baseline);
    if (!std::isfinite(baseline)) {
      throw Error(fmt::format("non-finite reward baseline after update {}", step));
    }

    UpdateRow row;
    row.step = step;
    row.accuracy_percent = accuracy_pp;
    row.mean_significant = sum_sig / batch;
    row.mean_insignificant = sum_insig / batch;
    row.mean_reward = reward_mean;
    row.slope = slope;
    row.phase = result.scheduler.phase();
    row.decay_counter = decay;
    row.lambda_t = lambda_schedule(result.scheduler, spec.reward.alpha);
    result.log.push_back(row);
  }

  result.policy_logits = theta;
  result.baseline = baseline;

  // --- final evaluation with the policy frozen
  const std::vector<double> pi_final = softmax(theta);
  MetricsAccumulator metrics(spec.reward.tau, spec.l_max);
  double eval_sig = 0.0;
  double eval_insig = 0.0;
  for (int i = 0; i < ppo_cfg.eval_rollouts; ++i) {
    const int action = sample_action(eval_eng, pi_final);
    const EpisodeOutcome out = rollout_outcome(spec.task, action, episode++);
    SignificanceCounts counts;
    counts.significant = static_cast<std::size_t>(out.significant);
    counts.insignificant = static_cast<std::size_t>(out.insignificant);
    counts.threshold = spec.reward.tau;
    metrics.add(counts, out.correct);
    eval_sig += out.significant;
    eval_insig += out.insignificant;
  }
  result.eval_report = metrics.report();
  const SplitMetrics& all = result.eval_report.all;
  result.eval.accuracy_percent = all.accuracy_percent;
  result.eval.mean_length = all.mean_length;
  result.eval.mean_significant = eval_sig / ppo_cfg.eval_rollouts;
  result.eval.mean_insignificant = eval_insig / ppo_cfg.eval_rollouts;
  result.eval.significant_ratio = all.significant_ratio;
  result.eval.l_acc = all.l_acc;
  result.eval.n = ppo_cfg.eval_rollouts;
  return result;
}

void write_policy_checkpoint(const std::string& path, const TrainSpec& spec,
                             const TrainResult& result) {
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path));
  out << "bingo-policy v1\n";
  out << fmt::format("grid {} {}\n", ActionGrid::kSignificantLevels,
                     ActionGrid::kVerbosityLevels);
  out << fmt::format("seed {}\n", spec.seed);
  out << fmt::format("updates {}\n", spec.updates);
  out << fmt::format("baseline {}\n", result.baseline);
  out << fmt::format("theta {}\n", result.policy_logits.size());
  for (std::size_t a = 0; a < result.policy_logits.size(); ++a) {
    out << fmt::format("{} {}\n", a, result.policy_logits[a]);
  }
  out.flush();
  if (!out.good()) throw IoError(fmt::format("failed writing '{}'", path));
}

PolicyCheckpoint read_policy_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path));
  std::string line;
  auto next_line = [&](const char* what) {
    if (!std::getline(in, line)) {
      throw ParseError(fmt::format("{}: unexpected end of file ({})", path, what));
    }
    return line;
  };
  if (next_line("header") != "bingo-policy v1") {
    throw ParseError(fmt::format("{}: not a policy checkpoint", path));
  }
  PolicyCheckpoint ckpt;
  int sig_levels = 0;
  int verb_levels = 0;
  std::size_t n_theta = 0;
  {
    std::istringstream fields(next_line("grid"));
    std::string tag;
    if (!(fields >> tag >> sig_levels >> verb_levels) || tag != "grid") {
      throw ParseError(fmt::format("{}: malformed grid line", path));
    }
  }
  {
    std::istringstream fields(next_line("seed"));
    std::string tag;
    if (!(fields >> tag >> ckpt.seed) || tag != "seed") {
      throw ParseError(fmt::format("{}: malformed seed line", path));
    }
  }
  {
    std::istringstream fields(next_line("updates"));
    std::string tag;
    if (!(fields >> tag >> ckpt.updates) || tag != "updates") {
      throw ParseError(fmt::format("{}: malformed updates line", path));
    }
  }
  {
    std::istringstream fields(next_line("baseline"));
    std::string tag;
    if (!(fields >> tag >> ckpt.baseline) || tag != "baseline") {
      throw ParseError(fmt::format("{}: malformed baseline line", path));
    }
  }
  {
    std::istringstream fields(next_line("theta count"));
    std::string tag;
    if (!(fields >> tag >> n_theta) || tag != "theta") {
      throw ParseError(fmt::format("{}: malformed theta count line", path));
    }
  }
  if (sig_levels != ActionGrid::kSignificantLevels ||
      verb_levels != ActionGrid::kVerbosityLevels ||
      n_theta != static_cast<std::size_t>(ActionGrid::size())) {
    throw ParseError(fmt::format(
        "{}: checkpoint grid {}x{} ({} logits) does not match the action grid "
        "{}x{}",
        path, sig_levels, verb_levels, n_theta, ActionGrid::kSignificantLevels,
        ActionGrid::kVerbosityLevels));
  }
  ckpt.logits.resize(n_theta, 0.0);
  for (std::size_t a = 0; a < n_theta; ++a) {
    std::istringstream fields(next_line("theta entry"));
    std::size_t index = 0;
    double value = 0.0;
    if (!(fields >> index >> value) || index != a) {
      throw ParseError(fmt::format("{}: malformed theta entry {}", path, a));
    }
    ckpt.logits[a] = value;
  }
  return ckpt;
}

}  // namespace bingo
