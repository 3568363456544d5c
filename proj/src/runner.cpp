#include "runner.hpp"

#include <filesystem>
#include <fstream>
#include <system_error>

#include <fmt/core.h>

#include "errors.hpp"
#include "metrics.hpp"
#include "scheduler.hpp"

namespace bingo {

namespace fs = std::filesystem;

void write_training_log_csv(const std::string& path,
                            const std::vector<UpdateRow>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path));
  out << "step,accuracy,mean_sig_len,mean_insig_len,mean_reward,k,phase,"
         "lambda_t\n";
  for (const UpdateRow& row : rows) {
    out << fmt::format("{},{},{},{},{},{},{},{}\n", row.step,
                       row.accuracy_percent, row.mean_significant,
                       row.mean_insignificant, row.mean_reward, row.slope,
                       phase_name(row.phase), row.lambda_t);
  }
  out.flush();
  if (!out.good()) throw IoError(fmt::format("failed writing '{}'", path));
}

RunArtifacts run_training(const ExperimentConfig& config, RewardKind kind) {
  validate(config);

  const fs::path out_dir(config.out_dir);
  std::error_code ec;
  for (const fs::path& dir :
       {out_dir, out_dir / "logs", out_dir / "reports", out_dir / "checkpoints"}) {
    fs::create_directories(dir, ec);
    if (ec) {
      throw IoError(fmt::format("cannot create directory '{}': {}", dir.string(),
                                ec.message()));
    }
  }

  RunArtifacts artifacts;
  artifacts.config_echo = (out_dir / "config.ini").string();
  artifacts.training_log = (out_dir / "logs" / "training_log.csv").string();
  artifacts.scheduler_trace = (out_dir / "logs" / "scheduler_trace.csv").string();
  artifacts.final_metrics = (out_dir / "reports" / "final_metrics.csv").string();
  artifacts.checkpoint = (out_dir / "checkpoints" / "policy.txt").string();

  // Echo the effective configuration first so a crashed run still records
  // what it was asked to do.
  write_config_ini(artifacts.config_echo, config);

  const TrainSpec spec = to_train_spec(config, kind);
  artifacts.result = train(spec);

  write_training_log_csv(artifacts.training_log, artifacts.result.log);
  write_scheduler_csv(artifacts.scheduler_trace, artifacts.result.scheduler,
                      spec.reward.alpha);
  write_report_csv(artifacts.final_metrics, artifacts.result.eval_report);
  write_policy_checkpoint(artifacts.checkpoint, spec, artifacts.result);
  return artifacts;
}

}  // namespace bingo
