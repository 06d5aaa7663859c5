#include "gkd/train.hpp"

#include <cmath>
#include <cstring>
#include <map>
#include <stdexcept>

#include "gkd/rng.hpp"

namespace gkd {

std::string to_string(OptimizerKind k) {
  return k == OptimizerKind::adam ? "adam" : "sgd";
}

OptimizerKind optimizer_from_string(const std::string& s) {
  if (s == "adam") return OptimizerKind::adam;
  if (s == "sgd") return OptimizerKind::sgd;
  throw std::invalid_argument("unknown optimizer '" + s + "'");
}

void TrainConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs < 1");
  if (base_lr <= 0.0) throw std::invalid_argument("TrainConfig: base_lr <= 0");
  if (decay_factor <= 0.0 || decay_factor > 1.0) {
    throw std::invalid_argument("TrainConfig: decay_factor must be in (0,1]");
  }
  if (decay_every < 1) throw std::invalid_argument("TrainConfig: decay_every < 1");
  if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size < 1");
  if (num_classes < 2) throw std::invalid_argument("TrainConfig: num_classes < 2");
}

void optimizer_step(OptimizerKind kind, const std::vector<Array*>& params,
                    const std::vector<Array>& grads, OptimizerState& state,
                    double lr) {
  if (params.size() != grads.size()) {
    throw std::invalid_argument("optimizer_step: param/grad count mismatch");
  }
  for (std::size_t p = 0; p < params.size(); ++p) {
    if (params[p]->shape != grads[p].shape) {
      throw ShapeError("optimizer_step: param " + shape_str(params[p]->shape) +
                       " vs grad " + shape_str(grads[p].shape));
    }
    if (!grads[p].all_finite()) {
      throw std::runtime_error("optimizer_step: non-finite gradient in tensor " +
                               std::to_string(p));
    }
  }
  if (kind == OptimizerKind::sgd) {
    for (std::size_t p = 0; p < params.size(); ++p) {
      for (std::size_t i = 0; i < params[p]->size(); ++i) {
        params[p]->data[i] -= lr * grads[p].data[i];
      }
    }
    state.step += 1;
    return;
  }
  // adam
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  if (state.m.empty()) {
    for (const Array* a : params) {
      state.m.push_back(Array::zeros(a->shape));
      state.v.push_back(Array::zeros(a->shape));
    }
  }
  state.step += 1;
  double t = static_cast<double>(state.step);
  double bc1 = 1.0 - std::pow(beta1, t);
  double bc2 = 1.0 - std::pow(beta2, t);
  for (std::size_t p = 0; p < params.size(); ++p) {
    for (std::size_t i = 0; i < params[p]->size(); ++i) {
      double g = grads[p].data[i];
      double& m = state.m[p].data[i];
      double& v = state.v[p].data[i];
      m = beta1 * m + (1.0 - beta1) * g;
      v = beta2 * v + (1.0 - beta2) * g * g;
      params[p]->data[i] -= lr * (m / bc1) / (std::sqrt(v / bc2) + eps);
    }
  }
}

double lr_schedule(int epoch, const TrainConfig& cfg) {
  if (epoch < 0) throw std::invalid_argument("lr_schedule: negative epoch");
  return cfg.base_lr * std::pow(cfg.decay_factor, epoch / cfg.decay_every);
}

namespace {

std::vector<double> binary_targets(const VideoSample& v, int k) {
  if (static_cast<int>(v.labels.size()) != k) {
    throw std::invalid_argument("video " + v.id + ": expected " +
                                std::to_string(k) + " binary labels, got " +
                                std::to_string(v.labels.size()));
  }
  std::vector<double> t(v.labels.begin(), v.labels.end());
  return t;
}

Array forward_only_logits(const Model& model, const VideoSample& video) {
  Tape tape;
  Tape::VarId logits = model_forward(tape, model, video);
  return tape.value(logits);
}

// Mean gradient of the per-video losses over one batch, accumulated into
// `accum`; returns the mean loss.
double batch_gradients(const Model& model, const std::vector<VideoSample>& data,
                       const std::vector<std::size_t>& batch,
                       DatasetMode mode,
                       const DistillConfig* dcfg, const Model* teacher,
                       std::vector<Array>& accum) {
  double total = 0.0;
  double w = 1.0 / static_cast<double>(batch.size());
  for (std::size_t idx : batch) {
    const VideoSample& video = data[idx];
    Tape tape;
    ModelVars vars;
    Tape::VarId logits = model_forward(tape, model, video, &vars);
    Tape::VarId hard =
        mode == DatasetMode::single_label
            ? tape.cross_entropy(logits, static_cast<std::size_t>(video.label))
            : tape.bce_with_logits(
                  logits, binary_targets(video, static_cast<int>(
                                                    model.num_classes())));
    Tape::VarId loss = hard;
    if (dcfg) {
      Array teacher_logits = forward_only_logits(*teacher, video);
      Tape::VarId dl = distill_loss(tape, *dcfg, teacher_logits, logits);
      loss = student_objective(tape, hard, dl, dcfg->lambda1, dcfg->lambda2);
    }
    double lv = tape.value(loss).data[0];
    if (!std::isfinite(lv)) {
      throw std::runtime_error("non-finite loss on video " + video.id);
    }
    total += lv;
    tape.backward(loss);
    for (std::size_t p = 0; p < vars.params.size(); ++p) {
      const Array& g = tape.grad(vars.params[p]);
      for (std::size_t i = 0; i < g.size(); ++i) {
        accum[p].data[i] += w * g.data[i];
      }
    }
  }
  return total * w;
}

void clip_gradients(std::vector<Array>& grads, double max_norm) {
  if (max_norm <= 0.0) return;
  double sq = 0.0;
  for (const Array& g : grads) {
    for (double v : g.data) sq += v * v;
  }
  double norm = std::sqrt(sq);
  if (norm > max_norm) {
    double s = max_norm / norm;
    for (Array& g : grads) {
      for (double& v : g.data) v *= s;
    }
  }
}

// Shared epoch loop; dcfg/teacher are null for plain hard-label training.
// PRNG consumption: model init first (inside caller), then one shuffle per
// epoch, so lambda2=0 distillation reproduces plain training bit-exactly.
void run_training(ModelState& st, const std::vector<VideoSample>& data,
                  const DistillConfig* dcfg, const Model* teacher, Rng& rng) {
  if (data.empty()) throw std::invalid_argument("training data is empty");
  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<Array*> params = model_params(st.model);
  for (int epoch = 0; epoch < st.cfg.epochs; ++epoch) {
    double lr = lr_schedule(epoch, st.cfg);
    rng.shuffle(order);
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(st.cfg.batch_size)) {
      std::size_t end = std::min(order.size(),
                                 start + static_cast<std::size_t>(st.cfg.batch_size));
      std::vector<std::size_t> batch(order.begin() + static_cast<long>(start),
                                     order.begin() + static_cast<long>(end));
      std::vector<Array> grads;
      for (Array* p : params) grads.push_back(Array::zeros(p->shape));
      epoch_loss += batch_gradients(st.model, data, batch, st.cfg.dataset_mode,
                                    dcfg, teacher, grads);
      clip_gradients(grads, st.cfg.clip_norm);
      optimizer_step(st.cfg.optimizer, params, grads, st.opt, lr);
      ++batches;
    }
    st.loss_trace.push_back(epoch_loss / static_cast<double>(batches));
    st.epoch = epoch + 1;
  }
}

ModelState init_state(const TrainConfig& cfg, std::size_t d_in, Rng& rng) {
  ModelState st;
  st.cfg = cfg;
  st.opt.kind = cfg.optimizer;
  st.model = init_model(cfg.context, d_in,
                        static_cast<std::size_t>(cfg.hidden_dim),
                        static_cast<std::size_t>(cfg.gat_layers),
                        static_cast<std::size_t>(cfg.num_classes), rng);
  return st;
}

std::size_t data_feature_dim(const std::vector<VideoSample>& data) {
  if (data.empty()) throw std::invalid_argument("training data is empty");
  data.front().validate();
  return data.front().frames.front().nodes.front().feat.size();
}

}  // namespace

ModelState train_teacher(const std::vector<VideoSample>& data,
                         const TrainConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  ModelState st = init_state(cfg, data_feature_dim(data), rng);
  run_training(st, data, nullptr, nullptr, rng);
  return st;
}

ModelState train_student(const std::vector<VideoSample>& data,
                         const ModelState& teacher, const TrainConfig& cfg,
                         const DistillConfig& dcfg) {
  cfg.validate();
  dcfg.validate();
  if (teacher.model.context != dcfg.teacher_context) {
    throw std::invalid_argument("train_student: teacher context is " +
                                to_string(teacher.model.context) +
                                " but config expects " +
                                to_string(dcfg.teacher_context));
  }
  if (cfg.context != dcfg.student_context) {
    throw std::invalid_argument("train_student: student context is " +
                                to_string(cfg.context) +
                                " but config expects " +
                                to_string(dcfg.student_context));
  }
  if (teacher.model.num_classes() != static_cast<std::size_t>(cfg.num_classes)) {
    throw std::invalid_argument("train_student: class count mismatch");
  }
  Rng rng(cfg.seed);
  ModelState st = init_state(cfg, data_feature_dim(data), rng);
  run_training(st, data, &dcfg, &teacher.model, rng);
  return st;
}

std::pair<ModelState, ModelState> train_dml(
    const std::vector<VideoSample>& data, const TrainConfig& cfg_a,
    const TrainConfig& cfg_b, const DistillConfig& dcfg) {
  cfg_a.validate();
  cfg_b.validate();
  if (cfg_a.context == cfg_b.context) {
    throw std::invalid_argument("train_dml: peers must use different contexts");
  }
  if (cfg_a.epochs != cfg_b.epochs || cfg_a.batch_size != cfg_b.batch_size) {
    throw std::invalid_argument("train_dml: peers must share epochs/batch_size");
  }
  if (data.empty()) throw std::invalid_argument("training data is empty");
  std::size_t d_in = data_feature_dim(data);
  Rng rng_a(cfg_a.seed);
  Rng rng_b(splitmix64_mix(cfg_b.seed ^ 0x9E3779B97F4A7C15ULL));
  ModelState a = init_state(cfg_a, d_in, rng_a);
  ModelState b = init_state(cfg_b, d_in, rng_b);
  std::vector<Array*> pa = model_params(a.model);
  std::vector<Array*> pb = model_params(b.model);

  DistillConfig da = dcfg;  // distill a toward b's predictions
  da.teacher_context = cfg_b.context;
  da.student_context = cfg_a.context;
  DistillConfig db = dcfg;
  db.teacher_context = cfg_a.context;
  db.student_context = cfg_b.context;

  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 0; epoch < cfg_a.epochs; ++epoch) {
    rng_a.shuffle(order);
    double loss_a = 0.0, loss_b = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg_a.batch_size)) {
      std::size_t end = std::min(order.size(),
                                 start + static_cast<std::size_t>(cfg_a.batch_size));
      std::vector<std::size_t> batch(order.begin() + static_cast<long>(start),
                                     order.begin() + static_cast<long>(end));
      // a updates against b's detached predictions, then b against the
      // already-updated a (same-step alternation)
      std::vector<Array> ga, gb;
      for (Array* p : pa) ga.push_back(Array::zeros(p->shape));
      loss_a += batch_gradients(a.model, data, batch, cfg_a.dataset_mode, &da,
                                &b.model, ga);
      clip_gradients(ga, cfg_a.clip_norm);
      optimizer_step(cfg_a.optimizer, pa, ga, a.opt, lr_schedule(epoch, cfg_a));

      for (Array* p : pb) gb.push_back(Array::zeros(p->shape));
      loss_b += batch_gradients(b.model, data, batch, cfg_b.dataset_mode, &db,
                                &a.model, gb);
      clip_gradients(gb, cfg_b.clip_norm);
      optimizer_step(cfg_b.optimizer, pb, gb, b.opt, lr_schedule(epoch, cfg_b));
      ++batches;
    }
    a.loss_trace.push_back(loss_a / static_cast<double>(batches));
    b.loss_trace.push_back(loss_b / static_cast<double>(batches));
    a.epoch = b.epoch = epoch + 1;
  }
  return {std::move(a), std::move(b)};
}

Array predict_logits(const Model& model, const std::vector<VideoSample>& data) {
  std::size_t k = model.num_classes();
  Array out = Array::zeros({data.size(), k});
  for (std::size_t i = 0; i < data.size(); ++i) {
    Array logits = forward_only_logits(model, data[i]);
    for (std::size_t j = 0; j < k; ++j) out.data[i * k + j] = logits.data[j];
  }
  return out;
}

EvalReport evaluate(const Model& model, const std::vector<VideoSample>& data,
                    DatasetMode mode) {
  EvalReport rep;
  rep.mode = to_string(mode);
  rep.n_samples = data.size();
  Array logits = predict_logits(model, data);
  std::size_t k = model.num_classes();
  if (mode == DatasetMode::single_label) {
    std::vector<int> labels;
    labels.reserve(data.size());
    for (const VideoSample& v : data) labels.push_back(v.label);
    rep.accuracy = accuracy(logits, labels);
    rep.confusion = confusion_matrix(logits, labels, k);
  } else {
    Array targets = Array::zeros({data.size(), k});
    for (std::size_t i = 0; i < data.size(); ++i) {
      std::vector<double> t =
          binary_targets(data[i], static_cast<int>(k));
      for (std::size_t j = 0; j < k; ++j) targets.data[i * k + j] = t[j];
    }
    MapResult mr = mean_average_precision(logits, targets);
    rep.map = mr.map;
    rep.per_class_ap = mr.per_class_ap;
  }
  return rep;
}

LoocvResult loocv(const std::vector<VideoSample>& data, const TrainConfig& cfg,
                  const std::optional<DistillConfig>& dcfg) {
  std::map<std::string, std::size_t> subject_counts;
  for (const VideoSample& v : data) subject_counts[v.subject] += 1;
  if (subject_counts.size() < 2) {
    throw std::invalid_argument("loocv: need at least 2 subjects");
  }
  for (const auto& [subject, count] : subject_counts) {
    if (count == 0) {
      throw std::invalid_argument("loocv: subject " + subject + " is empty");
    }
  }
  LoocvResult out;
  for (const auto& [subject, count] : subject_counts) {
    std::vector<VideoSample> train_set, test_set;
    for (const VideoSample& v : data) {
      (v.subject == subject ? test_set : train_set).push_back(v);
    }
    Model final_model;
    if (dcfg) {
      TrainConfig tcfg = cfg;
      tcfg.context = dcfg->teacher_context;
      ModelState teacher = train_teacher(train_set, tcfg);
      TrainConfig scfg = cfg;
      scfg.context = dcfg->student_context;
      final_model = train_student(train_set, teacher, scfg, *dcfg).model;
    } else {
      final_model = train_teacher(train_set, cfg).model;
    }
    EvalReport rep = evaluate(final_model, test_set, cfg.dataset_mode);
    LoocvFold fold;
    fold.subject = subject;
    fold.accuracy = rep.accuracy ? *rep.accuracy : (rep.map ? *rep.map : 0.0);
    fold.n_test = test_set.size();
    out.folds.push_back(fold);
  }
  double sum = 0.0;
  for (const LoocvFold& f : out.folds) sum += f.accuracy;
  out.mean_accuracy = sum / static_cast<double>(out.folds.size());
  return out;
}

std::uint64_t param_checksum(const Model& model) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const Array* a : model_params(model)) {
    for (double v : a->data) {
      std::uint64_t bits;
      std::memcpy(&bits, &v, sizeof bits);
      for (int i = 0; i < 8; ++i) {
        h ^= (bits >> (8 * i)) & 0xFF;
        h *= 1099511628211ULL;
      }
    }
  }
  return h;
}

}  // namespace gkd
