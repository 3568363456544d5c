/* Public C interface of the bingo library.
 *
 * Every function returns a bingo_status; outputs travel through pointer
 * parameters. On failure, bingo_last_error() describes what went wrong
 * (thread-local, overwritten by the next failing call on the same thread).
 * Handles are opaque; free them with the matching *_free function. NULL is
 * never a valid handle argument unless stated otherwise.
 */
#ifndef BINGO_H
#define BINGO_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#ifdef BINGO_BUILD
#define BINGO_API __declspec(dllexport)
#else
#define BINGO_API __declspec(dllimport)
#endif
#else
#define BINGO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bingo_status {
  BINGO_OK = 0,
  BINGO_E_INVALID = 1, /* bad argument: NULL handle, out-of-domain value */
  BINGO_E_CONFIG = 2,  /* invalid configuration field or key */
  BINGO_E_PARSE = 3,   /* malformed input file */
  BINGO_E_IO = 4,      /* file could not be opened, read, or written */
  BINGO_E_RUNTIME = 5, /* internal failure (numeric blowup, broken data) */
} bingo_status;

/* Library version, "major.minor.patch". Never fails. */
BINGO_API const char* bingo_version(void);

/* Message of this thread's most recent failure ("" after a success). */
BINGO_API const char* bingo_last_error(void);

/* ---- configuration ------------------------------------------------- */

typedef struct bingo_config bingo_config;

/* Built-in defaults. */
BINGO_API bingo_status bingo_config_create(bingo_config** out_config);

/* Parse an INI-style config file (strict: unknown keys are errors). */
BINGO_API bingo_status bingo_config_load(const char* path,
                                         bingo_config** out_config);

BINGO_API bingo_status bingo_config_set_seed(bingo_config* config,
                                             uint64_t seed);
BINGO_API bingo_status bingo_config_set_out_dir(bingo_config* config,
                                                const char* out_dir);

/* Read or update one numeric field by dotted key, e.g. "reward.tau",
 * "ppo.actor_lr", "metrics.l_max". Booleans read and write as 0/1. */
BINGO_API bingo_status bingo_config_get(const bingo_config* config,
                                        const char* key, double* out_value);
BINGO_API bingo_status bingo_config_set(bingo_config* config, const char* key,
                                        double value);

BINGO_API void bingo_config_free(bingo_config* config);

/* ---- traces --------------------------------------------------------- */

typedef struct bingo_traces bingo_traces;

/* Load a JSON-lines trace file:
 * {"prompt_id": "...", "correct": 0|1, "tokens": [{"t": "...", "s": 0.9}]} */
BINGO_API bingo_status bingo_traces_load(const char* path,
                                         bingo_traces** out_traces);
BINGO_API bingo_status bingo_traces_count(const bingo_traces* traces,
                                          size_t* out_count);
BINGO_API void bingo_traces_free(bingo_traces* traces);

/* ---- metrics -------------------------------------------------------- */

/* Length-adjusted accuracy: acc * sqrt(1 - len / l_max), clamped to 0 at
 * len >= l_max. Accuracy is in percentage points. */
BINGO_API bingo_status bingo_l_acc(double accuracy_percent, double mean_length,
                                   double l_max, double* out_l_acc);

typedef struct bingo_metrics_summary {
  double accuracy_percent;
  double mean_length;
  double l_acc;
  double significant_ratio;
  size_t n_samples;
} bingo_metrics_summary;

/* Compute the metrics report over a trace file. The CSV (split-by-
 * correctness table) goes to csv_path, or to standard output when csv_path
 * is NULL. out_summary (nullable) receives the all-samples row. */
BINGO_API bingo_status bingo_metrics_report(const bingo_traces* traces,
                                            double tau, double l_max,
                                            const char* csv_path,
                                            bingo_metrics_summary* out_summary);

/* ---- reward scoring -------------------------------------------------- */

/* Scheduler snapshot the reward is evaluated at. Set k to +infinity for the
 * exploration phase before any slope exists. Non-positive reference lengths
 * mean "use this batch's mean lengths". */
typedef struct bingo_reward_snapshot {
  double ref_significant;
  double ref_insignificant;
  double k;
  int decay_counter;
} bingo_reward_snapshot;

/* Score every trace with the reward weights from `config` at the given
 * snapshot. Writes one JSON record per line to out_path (NULL for standard
 * output): {prompt_id, correct, L_s, L_is, r_is, r_s, total, phase}. */
BINGO_API bingo_status bingo_score_traces(const bingo_config* config,
                                          const bingo_traces* traces,
                                          const bingo_reward_snapshot* snapshot,
                                          const char* out_path);

/* ---- training --------------------------------------------------------- */

typedef struct bingo_train_summary {
  double accuracy_percent;   /* final frozen-policy evaluation */
  double mean_length;
  double mean_significant;
  double mean_insignificant;
  double significant_ratio;
  double l_acc;
  int64_t transition_step; /* first compression step, -1 if never reached */
} bingo_train_summary;

/* Run one seeded training experiment. reward_kind is one of "bingo",
 * "vanilla", "static-length", "sig-only". Artifacts land in the config's
 * output directory: config.ini, logs/training_log.csv,
 * logs/scheduler_trace.csv, reports/final_metrics.csv,
 * checkpoints/policy.txt. out_summary is nullable. */
BINGO_API bingo_status bingo_train(const bingo_config* config,
                                   const char* reward_kind,
                                   bingo_train_summary* out_summary);

/* ---- analysis ---------------------------------------------------------- */

/* Static-vs-dynamic penalty schedule sweep; 240 rows of
 * curve_id,lambda_T,L_s,L_d,J_static,J_dyn,gap,lacc_static,lacc_dyn. */
BINGO_API bingo_status bingo_analyze_schedule_sweep(const char* csv_path,
                                                    double l_max);

/* Reward-dominance scan on the seeded oracle batch. */
BINGO_API bingo_status bingo_analyze_dominance(const char* csv_path,
                                               uint64_t seed);

/* Length-penalty factor of the efficiency metric, sampled on a grid. */
BINGO_API bingo_status bingo_analyze_penalty_curve(const char* csv_path,
                                                   double l_max, int samples);

/* ---- visualisation ------------------------------------------------------ */

/* Render traces as a self-contained HTML page colouring each token by its
 * significance score. */
BINGO_API bingo_status bingo_heatmap_render(const bingo_traces* traces,
                                            double tau, const char* out_path);

#ifdef __cplusplus
}
#endif

#endif /* BINGO_H */
