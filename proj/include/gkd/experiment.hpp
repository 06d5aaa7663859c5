#pragma once

#include <string>
#include <vector>

#include "gkd/checkpoint.hpp"
#include "gkd/train.hpp"

namespace gkd {

// One (T, lambda2) grid cell of the distillation sweep; lambda1 = 1-lambda2.
struct SweepCell {
  double temperature = 0.0;
  double lambda2 = 0.0;
  double metric = 0.0;  // accuracy or mAP on the eval split
};

struct SweepResult {
  std::vector<SweepCell> cells;
  SweepCell best;
  std::string to_csv() const;  // header + one row per cell
};

// Trains the teacher once (it does not depend on T or lambda2) and one
// student per grid cell.
SweepResult run_sweep(const std::vector<VideoSample>& train_data,
                      const std::vector<VideoSample>& eval_data,
                      const TrainConfig& student_cfg,
                      const DistillConfig& base_dcfg,
                      const std::vector<double>& temperatures,
                      const std::vector<double>& lambda2s);

struct AblationRow {
  std::string name;
  double metric = 0.0;
};

struct AblationReport {
  std::vector<AblationRow> rows;
  std::string to_csv() const;
  std::string to_text() const;
};

// The ablation table: baseline, each single-context model, both
// teacher-direction distilled students, and both DML peers.
AblationReport run_report(const std::vector<VideoSample>& train_data,
                          const std::vector<VideoSample>& eval_data,
                          const TrainConfig& cfg, const DistillConfig& dcfg);

// Run manifest written next to every artifact: config, seed, code version,
// metrics. The timestamp field is informational and excluded from
// byte-identity comparisons.
std::string make_manifest(const std::string& command, const std::string& config_json,
                          std::uint64_t seed, const std::string& metrics_json);

inline constexpr const char* kCodeVersion = "0.1.0";

double eval_metric(const Model& model, const std::vector<VideoSample>& data,
                   DatasetMode mode);

}  // namespace gkd
