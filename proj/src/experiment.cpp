#include "gkd/experiment.hpp"

#include <chrono>
#include <cstdio>

#include <nlohmann/json.hpp>

namespace gkd {

namespace {
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}
}  // namespace

double eval_metric(const Model& model, const std::vector<VideoSample>& data,
                   DatasetMode mode) {
  EvalReport rep = evaluate(model, data, mode);
  return mode == DatasetMode::single_label ? *rep.accuracy : *rep.map;
}

std::string SweepResult::to_csv() const {
  std::string out = "T,lambda2,metric\n";
  for (const SweepCell& c : cells) {
    out += fmt(c.temperature) + "," + fmt(c.lambda2) + "," + fmt(c.metric) + "\n";
  }
  return out;
}

SweepResult run_sweep(const std::vector<VideoSample>& train_data,
                      const std::vector<VideoSample>& eval_data,
                      const TrainConfig& student_cfg,
                      const DistillConfig& base_dcfg,
                      const std::vector<double>& temperatures,
                      const std::vector<double>& lambda2s) {
  TrainConfig tcfg = student_cfg;
  tcfg.context = base_dcfg.teacher_context;
  ModelState teacher = train_teacher(train_data, tcfg);

  SweepResult out;
  bool first = true;
  for (double t : temperatures) {
    for (double l2 : lambda2s) {
      DistillConfig d = base_dcfg;
      d.temperature = t;
      d.lambda2 = l2;
      d.lambda1 = 1.0 - l2;
      ModelState student = train_student(train_data, teacher, student_cfg, d);
      SweepCell cell{t, l2, eval_metric(student.model, eval_data,
                                        student_cfg.dataset_mode)};
      out.cells.push_back(cell);
      if (first || cell.metric > out.best.metric) {
        out.best = cell;
        first = false;
      }
    }
  }
  return out;
}

std::string AblationReport::to_csv() const {
  std::string out = "model,metric\n";
  for (const AblationRow& r : rows) out += r.name + "," + fmt(r.metric) + "\n";
  return out;
}

std::string AblationReport::to_text() const {
  std::size_t w = 5;
  for (const AblationRow& r : rows) w = std::max(w, r.name.size());
  std::string out;
  for (const AblationRow& r : rows) {
    out += r.name + std::string(w - r.name.size() + 2, ' ') + fmt(r.metric) + "\n";
  }
  return out;
}

AblationReport run_report(const std::vector<VideoSample>& train_data,
                          const std::vector<VideoSample>& eval_data,
                          const TrainConfig& cfg, const DistillConfig& dcfg) {
  AblationReport rep;
  auto add = [&](const std::string& name, const Model& m) {
    rep.rows.push_back({name, eval_metric(m, eval_data, cfg.dataset_mode)});
  };

  TrainConfig base_cfg = cfg;
  base_cfg.context = ContextKind::baseline;
  add("baseline", train_teacher(train_data, base_cfg).model);

  TrainConfig local_cfg = cfg;
  local_cfg.context = ContextKind::local;
  ModelState local_teacher = train_teacher(train_data, local_cfg);
  add("local", local_teacher.model);

  TrainConfig global_cfg = cfg;
  global_cfg.context = ContextKind::global_ctx;
  ModelState global_teacher = train_teacher(train_data, global_cfg);
  add("global", global_teacher.model);

  // student distilled from the global teacher (local student), and the
  // reverse direction
  DistillConfig d_gt = dcfg;
  d_gt.teacher_context = ContextKind::global_ctx;
  d_gt.student_context = ContextKind::local;
  add("student_global_teacher",
      train_student(train_data, global_teacher, local_cfg, d_gt).model);

  DistillConfig d_lt = dcfg;
  d_lt.teacher_context = ContextKind::local;
  d_lt.student_context = ContextKind::global_ctx;
  add("student_local_teacher",
      train_student(train_data, local_teacher, global_cfg, d_lt).model);

  auto [dml_local, dml_global] = train_dml(train_data, local_cfg, global_cfg, dcfg);
  add("dml_local", dml_local.model);
  add("dml_global", dml_global.model);
  return rep;
}

std::string make_manifest(const std::string& command,
                          const std::string& config_json, std::uint64_t seed,
                          const std::string& metrics_json) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["code_version"] = kCodeVersion;
  j["seed"] = seed;
  j["config"] = config_json.empty() ? nlohmann::ordered_json(nullptr)
                                    : nlohmann::ordered_json::parse(config_json);
  j["metrics"] = metrics_json.empty()
                     ? nlohmann::ordered_json(nullptr)
                     : nlohmann::ordered_json::parse(metrics_json);
  j["timestamp"] = static_cast<long long>(
      std::chrono::duration_cast<std::chrono::seconds>(
          std::chrono::system_clock::now().time_since_epoch())
          .count());
  return j.dump(2);
}

}  // namespace gkd
