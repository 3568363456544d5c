#include "bingo.h"

#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "analysis.hpp"
#include "config.hpp"
#include "errors.hpp"
#include "heatmap.hpp"
#include "metrics.hpp"
#include "ppo.hpp"
#include "reward.hpp"
#include "runner.hpp"
#include "trace.hpp"

struct bingo_config {
  bingo::ExperimentConfig impl;
};

struct bingo_traces {
  std::vector<bingo::TokenTrace> impl;
};

namespace {

thread_local std::string g_last_error;

bingo_status fail(bingo_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

/// Run a callable, translating exceptions into status codes.
template <typename Fn>
bingo_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return BINGO_OK;
  } catch (const bingo::ConfigError& e) {
    return fail(BINGO_E_CONFIG, e.what());
  } catch (const bingo::ParseError& e) {
    return fail(BINGO_E_PARSE, e.what());
  } catch (const bingo::IoError& e) {
    return fail(BINGO_E_IO, e.what());
  } catch (const bingo::DataError& e) {
    return fail(BINGO_E_INVALID, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(BINGO_E_INVALID, e.what());
  } catch (const std::exception& e) {
    return fail(BINGO_E_RUNTIME, e.what());
  } catch (...) {
    return fail(BINGO_E_RUNTIME, "unknown error");
  }
}

bool check(bool condition, const char* message, bingo_status* status) {
  if (!condition) *status = fail(BINGO_E_INVALID, message);
  return condition;
}

/// Emit text to a file, or to standard output when path is NULL.
void emit(const char* path, const std::string& text) {
  if (path == nullptr) {
    if (std::fwrite(text.data(), 1, text.size(), stdout) != text.size()) {
      throw bingo::IoError("failed writing to standard output");
    }
    std::fflush(stdout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw bingo::IoError(fmt::format("cannot open '{}' for writing", path));
  out << text;
  out.flush();
  if (!out.good()) throw bingo::IoError(fmt::format("failed writing '{}'", path));
}

}  // namespace

extern "C" {

const char* bingo_version(void) { return "0.1.0"; }

const char* bingo_last_error(void) { return g_last_error.c_str(); }

bingo_status bingo_config_create(bingo_config** out_config) {
  bingo_status status = BINGO_OK;
  if (!check(out_config != nullptr, "out_config is NULL", &status)) return status;
  return guarded([&] { *out_config = new bingo_config{bingo::default_config()}; });
}

bingo_status bingo_config_load(const char* path, bingo_config** out_config) {
  bingo_status status = BINGO_OK;
  if (!check(path != nullptr, "path is NULL", &status)) return status;
  if (!check(out_config != nullptr, "out_config is NULL", &status)) return status;
  return guarded([&] { *out_config = new bingo_config{bingo::load_config(path)}; });
}

bingo_status bingo_config_set_seed(bingo_config* config, uint64_t seed) {
  bingo_status status = BINGO_OK;
  if (!check(config != nullptr, "config is NULL", &status)) return status;
  return guarded([&] {
    config->impl.seed = seed;
    config->impl.task.seed = seed;
  });
}

bingo_status bingo_config_set_out_dir(bingo_config* config, const char* out_dir) {
  bingo_status status = BINGO_OK;
  if (!check(config != nullptr, "config is NULL", &status)) return status;
  if (!check(out_dir != nullptr, "out_dir is NULL", &status)) return status;
  return guarded([&] {
    if (out_dir[0] == '\0') {
      throw bingo::ConfigError("out_dir must not be empty");
    }
    config->impl.out_dir = out_dir;
  });
}

bingo_status bingo_config_get(const bingo_config* config, const char* key,
                              double* out_value) {
  bingo_status status = BINGO_OK;
  if (!check(config != nullptr, "config is NULL", &status)) return status;
  if (!check(key != nullptr, "key is NULL", &status)) return status;
  if (!check(out_value != nullptr, "out_value is NULL", &status)) return status;
  return guarded([&] { *out_value = bingo::config_value(config->impl, key); });
}

bingo_status bingo_config_set(bingo_config* config, const char* key,
                              double value) {
  bingo_status status = BINGO_OK;
  if (!check(config != nullptr, "config is NULL", &status)) return status;
  if (!check(key != nullptr, "key is NULL", &status)) return status;
  return guarded([&] { bingo::config_set_value(config->impl, key, value); });
}

void bingo_config_free(bingo_config* config) { delete config; }

bingo_status bingo_traces_load(const char* path, bingo_traces** out_traces) {
  bingo_status status = BINGO_OK;
  if (!check(path != nullptr, "path is NULL", &status)) return status;
  if (!check(out_traces != nullptr, "out_traces is NULL", &status)) return status;
  return guarded([&] { *out_traces = new bingo_traces{bingo::load_traces(path)}; });
}

bingo_status bingo_traces_count(const bingo_traces* traces, size_t* out_count) {
  bingo_status status = BINGO_OK;
  if (!check(traces != nullptr, "traces is NULL", &status)) return status;
  if (!check(out_count != nullptr, "out_count is NULL", &status)) return status;
  *out_count = traces->impl.size();
  g_last_error.clear();
  return BINGO_OK;
}

void bingo_traces_free(bingo_traces* traces) { delete traces; }

bingo_status bingo_l_acc(double accuracy_percent, double mean_length,
                         double l_max, double* out_l_acc) {
  bingo_status status = BINGO_OK;
  if (!check(out_l_acc != nullptr, "out_l_acc is NULL", &status)) return status;
  return guarded(
      [&] { *out_l_acc = bingo::l_acc(accuracy_percent, mean_length, l_max); });
}

bingo_status bingo_metrics_report(const bingo_traces* traces, double tau,
                                  double l_max, const char* csv_path,
                                  bingo_metrics_summary* out_summary) {
  bingo_status status = BINGO_OK;
  if (!check(traces != nullptr, "traces is NULL", &status)) return status;
  return guarded([&] {
    const bingo::MetricsReport report =
        bingo::compute_report(traces->impl, tau, l_max);
    emit(csv_path, bingo::report_to_csv(report));
    if (out_summary != nullptr) {
      out_summary->accuracy_percent = report.all.accuracy_percent;
      out_summary->mean_length = report.all.mean_length;
      out_summary->l_acc = report.all.l_acc;
      out_summary->significant_ratio = report.all.significant_ratio;
      out_summary->n_samples = report.all.n_samples;
    }
  });
}

bingo_status bingo_score_traces(const bingo_config* config,
                                const bingo_traces* traces,
                                const bingo_reward_snapshot* snapshot,
                                const char* out_path) {
  bingo_status status = BINGO_OK;
  if (!check(config != nullptr, "config is NULL", &status)) return status;
  if (!check(traces != nullptr, "traces is NULL", &status)) return status;
  if (!check(snapshot != nullptr, "snapshot is NULL", &status)) return status;
  return guarded([&] {
    const bingo::RewardConfig& reward = config->impl.reward;
    bingo::ReferenceStats ref;
    ref.source = bingo::RefSource::kFixedConstant;
    ref.ref_significant = snapshot->ref_significant;
    ref.ref_insignificant = snapshot->ref_insignificant;
    if (ref.ref_significant <= 0.0 || ref.ref_insignificant <= 0.0) {
      // Fall back to this batch's own mean lengths.
      double sum_sig = 0.0;
      double sum_insig = 0.0;
      for (const bingo::TokenTrace& trace : traces->impl) {
        const bingo::SignificanceCounts counts =
            bingo::classify_tokens(trace, reward.tau);
        sum_sig += static_cast<double>(counts.significant);
        sum_insig += static_cast<double>(counts.insignificant);
      }
      const double n = traces->impl.empty()
                           ? 1.0
                           : static_cast<double>(traces->impl.size());
      if (ref.ref_significant <= 0.0) {
        ref.ref_significant = sum_sig > 0.0 ? sum_sig / n : 1.0;
      }
      if (ref.ref_insignificant <= 0.0) {
        ref.ref_insignificant = sum_insig > 0.0 ? sum_insig / n : 1.0;
      }
      ref.source = bingo::RefSource::kPerBatchMean;
    }

    std::string lines;
    for (const bingo::TokenTrace& trace : traces->impl) {
      const bingo::RewardBreakdown breakdown = bingo::bingo_reward(
          trace, ref, reward, snapshot->k, snapshot->decay_counter);
      lines += bingo::score_record_json(trace, breakdown);
      lines += '\n';
    }
    emit(out_path, lines);
  });
}

bingo_status bingo_train(const bingo_config* config, const char* reward_kind,
                         bingo_train_summary* out_summary) {
  bingo_status status = BINGO_OK;
  if (!check(config != nullptr, "config is NULL", &status)) return status;
  if (!check(reward_kind != nullptr, "reward_kind is NULL", &status)) return status;
  return guarded([&] {
    const bingo::RewardKind kind = bingo::parse_reward_kind(reward_kind);
    const bingo::RunArtifacts artifacts =
        bingo::run_training(config->impl, kind);
    if (out_summary != nullptr) {
      const bingo::EvalSummary& eval = artifacts.result.eval;
      out_summary->accuracy_percent = eval.accuracy_percent;
      out_summary->mean_length = eval.mean_length;
      out_summary->mean_significant = eval.mean_significant;
      out_summary->mean_insignificant = eval.mean_insignificant;
      out_summary->significant_ratio = eval.significant_ratio;
      out_summary->l_acc = eval.l_acc;
      const auto transition = artifacts.result.scheduler.transition_step();
      out_summary->transition_step =
          transition.has_value() ? static_cast<int64_t>(*transition) : -1;
    }
  });
}

bingo_status bingo_analyze_schedule_sweep(const char* csv_path, double l_max) {
  bingo_status status = BINGO_OK;
  if (!check(csv_path != nullptr, "csv_path is NULL", &status)) return status;
  return guarded([&] { bingo::write_schedule_sweep_csv(csv_path, l_max); });
}

bingo_status bingo_analyze_dominance(const char* csv_path, uint64_t seed) {
  bingo_status status = BINGO_OK;
  if (!check(csv_path != nullptr, "csv_path is NULL", &status)) return status;
  return guarded([&] { bingo::write_dominance_csv(csv_path, seed); });
}

bingo_status bingo_analyze_penalty_curve(const char* csv_path, double l_max,
                                         int samples) {
  bingo_status status = BINGO_OK;
  if (!check(csv_path != nullptr, "csv_path is NULL", &status)) return status;
  return guarded([&] { bingo::write_penalty_curve_csv(csv_path, l_max, samples); });
}

bingo_status bingo_heatmap_render(const bingo_traces* traces, double tau,
                                  const char* out_path) {
  bingo_status status = BINGO_OK;
  if (!check(traces != nullptr, "traces is NULL", &status)) return status;
  if (!check(out_path != nullptr, "out_path is NULL", &status)) return status;
  return guarded([&] { bingo::write_heatmap_html(out_path, traces->impl, tau); });
}

}  // extern "C"
