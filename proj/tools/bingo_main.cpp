// Command-line front end. Links against the public C interface only; all
// heavy lifting lives behind the shared library boundary.
#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "bingo.h"

namespace {

using ConfigPtr = std::unique_ptr<bingo_config, decltype(&bingo_config_free)>;
using TracesPtr = std::unique_ptr<bingo_traces, decltype(&bingo_traces_free)>;

struct GlobalOptions {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out_dir;
  bool quiet = false;

  std::string effective_out_dir() const {
    return out_dir.empty() ? "out" : out_dir;
  }
};

int exit_code(bingo_status status) {
  switch (status) {
    case BINGO_OK: return 0;
    case BINGO_E_INVALID:
    case BINGO_E_CONFIG: return 2;
    default: return 1;
  }
}

int report_failure(bingo_status status) {
  std::fprintf(stderr, "error: %s\n", bingo_last_error());
  return exit_code(status);
}

void note(const GlobalOptions& global, const std::string& message) {
  if (!global.quiet) std::fprintf(stderr, "%s\n", message.c_str());
}

/// Build the run configuration: file or defaults, then CLI overrides.
bingo_status make_config(const GlobalOptions& global, ConfigPtr& out) {
  bingo_config* raw = nullptr;
  bingo_status status =
      global.config_path.empty()
          ? bingo_config_create(&raw)
          : bingo_config_load(global.config_path.c_str(), &raw);
  if (status != BINGO_OK) return status;
  out = ConfigPtr(raw, &bingo_config_free);
  if (global.seed_given) {
    status = bingo_config_set_seed(out.get(), global.seed);
    if (status != BINGO_OK) return status;
  }
  if (!global.out_dir.empty()) {
    status = bingo_config_set_out_dir(out.get(), global.out_dir.c_str());
    if (status != BINGO_OK) return status;
  }
  return BINGO_OK;
}

bingo_status load_traces(const std::string& path, TracesPtr& out) {
  bingo_traces* raw = nullptr;
  const bingo_status status = bingo_traces_load(path.c_str(), &raw);
  if (status == BINGO_OK) out = TracesPtr(raw, &bingo_traces_free);
  return status;
}

/// Resolve an output path, defaulting into <out>/reports/, and make sure the
/// parent directory exists.
std::string prepare_output(const GlobalOptions& global,
                           const std::string& explicit_path,
                           const char* default_name) {
  namespace fs = std::filesystem;
  fs::path path = explicit_path.empty()
                      ? fs::path(global.effective_out_dir()) / "reports" /
                            default_name
                      : fs::path(explicit_path);
  if (!path.parent_path().empty()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);  // failure surfaces on open
  }
  return path.string();
}

double round_half_up_1dp(double value) {
  return std::floor(value * 10.0 + 0.5) / 10.0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Significance-aware length-reward laboratory"};
  app.require_subcommand(1);

  GlobalOptions global;
  app.add_option("--config", global.config_path,
                 "Experiment config file (defaults apply when omitted)");
  auto* seed_opt =
      app.add_option("--seed", global.seed, "Override the run seed");
  app.add_option("--out", global.out_dir,
                 "Output directory (default: config's out_dir, 'out')");
  app.add_flag("--quiet", global.quiet, "Suppress informational messages");

  // train
  auto* cmd_train = app.add_subcommand(
      "train", "Run one seeded training experiment and write its artifacts");
  cmd_train->fallthrough();
  std::string reward_kind = "bingo";
  cmd_train->add_option(
      "--reward", reward_kind,
      "Reward kind: bingo, vanilla, static-length, or sig-only");

  // score
  auto* cmd_score = app.add_subcommand(
      "score", "Apply the reward offline to a JSONL trace file");
  cmd_score->fallthrough();
  std::string score_traces_path;
  std::string score_output;
  double score_tau = -1.0;
  double score_ref_sig = 0.0;
  double score_ref_insig = 0.0;
  double score_k = std::numeric_limits<double>::infinity();
  int score_decay = 0;
  cmd_score->add_option("--traces", score_traces_path, "JSONL trace file")
      ->required();
  cmd_score->add_option("--tau", score_tau,
                        "Significance threshold override (default: config)");
  cmd_score->add_option("--ref-sig", score_ref_sig,
                        "Reference significant length (default: batch mean)");
  cmd_score->add_option("--ref-insig", score_ref_insig,
                        "Reference insignificant length (default: batch mean)");
  cmd_score->add_option("--k", score_k,
                        "Accuracy slope snapshot (default: inf, exploration)");
  cmd_score->add_option("--decay-t", score_decay,
                        "Compression decay counter (default 0)");
  cmd_score->add_option("--output", score_output,
                        "Write records here instead of standard output");

  // metrics
  auto* cmd_metrics = app.add_subcommand(
      "metrics", "Accuracy/length metrics from traces or an (acc, len) pair");
  cmd_metrics->fallthrough();
  std::string metrics_traces_path;
  std::string metrics_output;
  double metrics_acc = 0.0;
  double metrics_len = 0.0;
  double metrics_l_max = 8192.0;
  double metrics_tau = 0.5;
  auto* metrics_traces_opt =
      cmd_metrics->add_option("--traces", metrics_traces_path, "JSONL trace file");
  auto* metrics_acc_opt = cmd_metrics->add_option(
      "--acc", metrics_acc, "Accuracy in percentage points (pair mode)");
  auto* metrics_len_opt = cmd_metrics->add_option(
      "--len", metrics_len, "Mean response length in tokens (pair mode)");
  cmd_metrics->add_option("--l-max", metrics_l_max,
                          "Length budget of the adjusted accuracy");
  cmd_metrics->add_option("--tau", metrics_tau, "Significance threshold");
  cmd_metrics->add_option("--output", metrics_output,
                          "Write the CSV here instead of standard output");

  // analyze
  auto* cmd_analyze = app.add_subcommand(
      "analyze", "Closed-form schedule, dominance, and penalty-curve sweeps");
  cmd_analyze->fallthrough();
  cmd_analyze->require_subcommand(1);
  auto* cmd_sweep = cmd_analyze->add_subcommand(
      "schedule-sweep", "Static vs dynamic penalty schedules on concave curves");
  cmd_sweep->fallthrough();
  std::string sweep_output;
  double sweep_l_max = 8192.0;
  cmd_sweep->add_option("--output", sweep_output,
                        "CSV path (default <out>/reports/schedule_sweep.csv)");
  cmd_sweep->add_option("--l-max", sweep_l_max,
                        "Length budget for the adjusted-accuracy columns");
  auto* cmd_dominance = cmd_analyze->add_subcommand(
      "dominance", "Significance-aware vs length-penalised reward means");
  cmd_dominance->fallthrough();
  std::string dominance_output;
  cmd_dominance->add_option(
      "--output", dominance_output,
      "CSV path (default <out>/reports/dominance.csv)");
  auto* cmd_penalty = cmd_analyze->add_subcommand(
      "penalty-curve", "Length-penalty factor and derivative on a grid");
  cmd_penalty->fallthrough();
  std::string penalty_output;
  double penalty_l_max = 8192.0;
  int penalty_samples = 256;
  cmd_penalty->add_option("--output", penalty_output,
                          "CSV path (default <out>/reports/penalty_curve.csv)");
  cmd_penalty->add_option("--l-max", penalty_l_max, "Length budget");
  cmd_penalty->add_option("--samples", penalty_samples, "Grid size");

  // heatmap
  auto* cmd_heatmap = app.add_subcommand(
      "heatmap", "Render traces as a token-significance HTML page");
  cmd_heatmap->fallthrough();
  std::string heatmap_traces_path;
  std::string heatmap_output;
  double heatmap_tau = 0.5;
  cmd_heatmap->add_option("--traces", heatmap_traces_path, "JSONL trace file")
      ->required();
  cmd_heatmap->add_option("--tau", heatmap_tau, "Significance threshold");
  cmd_heatmap->add_option("--output", heatmap_output,
                          "HTML path (default <out>/reports/heatmap.html)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help, --version
    app.exit(e);
    return 2;
  }
  global.seed_given = seed_opt->count() > 0;

  if (*cmd_train) {
    ConfigPtr config(nullptr, &bingo_config_free);
    bingo_status status = make_config(global, config);
    if (status != BINGO_OK) return report_failure(status);
    bingo_train_summary summary{};
    status = bingo_train(config.get(), reward_kind.c_str(), &summary);
    if (status != BINGO_OK) return report_failure(status);
    if (!global.quiet) {
      std::fprintf(stderr,
                   "final eval: accuracy %.2f%%, mean length %.2f (sig %.2f, "
                   "insig %.2f), significant ratio %.3f, adjusted accuracy "
                   "%.2f\n",
                   summary.accuracy_percent, summary.mean_length,
                   summary.mean_significant, summary.mean_insignificant,
                   summary.significant_ratio, summary.l_acc);
      if (summary.transition_step >= 0) {
        std::fprintf(stderr, "compression began at step %" PRId64 "\n",
                     summary.transition_step);
      } else {
        std::fprintf(stderr, "run ended still in exploration\n");
      }
    }
    return 0;
  }

  if (*cmd_score) {
    ConfigPtr config(nullptr, &bingo_config_free);
    bingo_status status = make_config(global, config);
    if (status != BINGO_OK) return report_failure(status);
    if (score_tau > 0.0) {
      status = bingo_config_set(config.get(), "reward.tau", score_tau);
      if (status != BINGO_OK) return report_failure(status);
    }
    TracesPtr traces(nullptr, &bingo_traces_free);
    status = load_traces(score_traces_path, traces);
    if (status != BINGO_OK) return report_failure(status);
    bingo_reward_snapshot snapshot{};
    snapshot.ref_significant = score_ref_sig;
    snapshot.ref_insignificant = score_ref_insig;
    snapshot.k = score_k;
    snapshot.decay_counter = score_decay;
    status = bingo_score_traces(
        config.get(), traces.get(), &snapshot,
        score_output.empty() ? nullptr : score_output.c_str());
    if (status != BINGO_OK) return report_failure(status);
    if (!score_output.empty()) {
      note(global, "wrote " + score_output);
    }
    return 0;
  }

  if (*cmd_metrics) {
    const bool pair_mode =
        metrics_acc_opt->count() > 0 || metrics_len_opt->count() > 0;
    if (pair_mode &&
        (metrics_acc_opt->count() == 0 || metrics_len_opt->count() == 0)) {
      std::fprintf(stderr, "error: pair mode needs both --acc and --len\n");
      return 2;
    }
    if (pair_mode == (metrics_traces_opt->count() > 0)) {
      std::fprintf(stderr,
                   "error: pass either --traces or the --acc/--len pair\n");
      return 2;
    }
    if (pair_mode) {
      double adjusted = 0.0;
      const bingo_status status =
          bingo_l_acc(metrics_acc, metrics_len, metrics_l_max, &adjusted);
      if (status != BINGO_OK) return report_failure(status);
      std::printf("acc,mean_len,l_acc,l_acc_rounded\n");
      std::printf("%.12g,%.12g,%.12g,%.1f\n", metrics_acc, metrics_len,
                  adjusted, round_half_up_1dp(adjusted));
      return 0;
    }
    TracesPtr traces(nullptr, &bingo_traces_free);
    bingo_status status = load_traces(metrics_traces_path, traces);
    if (status != BINGO_OK) return report_failure(status);
    status = bingo_metrics_report(
        traces.get(), metrics_tau, metrics_l_max,
        metrics_output.empty() ? nullptr : metrics_output.c_str(), nullptr);
    if (status != BINGO_OK) return report_failure(status);
    if (!metrics_output.empty()) {
      note(global, "wrote " + metrics_output);
    }
    return 0;
  }

  if (*cmd_analyze) {
    if (*cmd_sweep) {
      const std::string path =
          prepare_output(global, sweep_output, "schedule_sweep.csv");
      const bingo_status status =
          bingo_analyze_schedule_sweep(path.c_str(), sweep_l_max);
      if (status != BINGO_OK) return report_failure(status);
      note(global, "wrote " + path);
      return 0;
    }
    if (*cmd_dominance) {
      const std::string path =
          prepare_output(global, dominance_output, "dominance.csv");
      const std::uint64_t seed = global.seed_given ? global.seed : 1;
      const bingo_status status = bingo_analyze_dominance(path.c_str(), seed);
      if (status != BINGO_OK) return report_failure(status);
      note(global, "wrote " + path);
      return 0;
    }
    const std::string path =
        prepare_output(global, penalty_output, "penalty_curve.csv");
    const bingo_status status =
        bingo_analyze_penalty_curve(path.c_str(), penalty_l_max, penalty_samples);
    if (status != BINGO_OK) return report_failure(status);
    note(global, "wrote " + path);
    return 0;
  }

  if (*cmd_heatmap) {
    TracesPtr traces(nullptr, &bingo_traces_free);
    bingo_status status = load_traces(heatmap_traces_path, traces);
    if (status != BINGO_OK) return report_failure(status);
    const std::string path =
        prepare_output(global, heatmap_output, "heatmap.html");
    status = bingo_heatmap_render(traces.get(), heatmap_tau, path.c_str());
    if (status != BINGO_OK) return report_failure(status);
    note(global, "wrote " + path);
    return 0;
  }

  std::fprintf(stderr, "error: no command selected\n");
  return 2;
}
