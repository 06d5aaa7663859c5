#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gkd/context.hpp"
#include "gkd/distill.hpp"
#include "gkd/metrics.hpp"
#include "gkd/synthdata.hpp"

namespace gkd {

enum class OptimizerKind { adam, sgd };

std::string to_string(OptimizerKind k);
OptimizerKind optimizer_from_string(const std::string& s);

struct TrainConfig {
  OptimizerKind optimizer = OptimizerKind::adam;
  double base_lr = 0.01;
  int epochs = 30;
  int decay_every = 50;
  double decay_factor = 0.1;
  int batch_size = 8;
  std::uint64_t seed = 0;
  ContextKind context = ContextKind::local;
  DatasetMode dataset_mode = DatasetMode::single_label;
  // model architecture
  int hidden_dim = 16;
  int gat_layers = 2;
  int num_classes = 8;
  // optional max-norm gradient clipping, 0 disables
  double clip_norm = 0.0;

  void validate() const;
};

struct OptimizerState {
  OptimizerKind kind = OptimizerKind::adam;
  std::vector<Array> m;  // first moments (adam only)
  std::vector<Array> v;  // second moments (adam only)
  long step = 0;
};

// One optimizer update in place. Adam uses beta1=0.9, beta2=0.999, eps=1e-8
// with bias correction.
void optimizer_step(OptimizerKind kind, const std::vector<Array*>& params,
                    const std::vector<Array>& grads, OptimizerState& state,
                    double lr);

double lr_schedule(int epoch, const TrainConfig& cfg);

struct ModelState {
  Model model;
  OptimizerState opt;
  int epoch = 0;
  TrainConfig cfg;
  std::vector<double> loss_trace;  // mean loss per epoch
};

ModelState train_teacher(const std::vector<VideoSample>& data,
                         const TrainConfig& cfg);

ModelState train_student(const std::vector<VideoSample>& data,
                         const ModelState& teacher, const TrainConfig& cfg,
                         const DistillConfig& dcfg);

std::pair<ModelState, ModelState> train_dml(
    const std::vector<VideoSample>& data, const TrainConfig& cfg_a,
    const TrainConfig& cfg_b, const DistillConfig& dcfg);

// Forward-only logits for a whole dataset, one row per video.
Array predict_logits(const Model& model, const std::vector<VideoSample>& data);

EvalReport evaluate(const Model& model, const std::vector<VideoSample>& data,
                    DatasetMode mode);

struct LoocvFold {
  std::string subject;
  double accuracy = 0.0;
  std::size_t n_test = 0;
};

struct LoocvResult {
  std::vector<LoocvFold> folds;
  double mean_accuracy = 0.0;
};

// One fold per subject: train on the others, test on the held-out subject.
// With a DistillConfig the per-fold model is teacher -> student; without,
// a plain cfg.context model.
LoocvResult loocv(const std::vector<VideoSample>& data, const TrainConfig& cfg,
                  const std::optional<DistillConfig>& dcfg = std::nullopt);

// FNV-1a over the parameter bit patterns; used for immutability checks.
std::uint64_t param_checksum(const Model& model);

}  // namespace gkd
