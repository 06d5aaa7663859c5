// Command-line driver: data generation, training, distillation, DML,
// evaluation, sweeps, gradient checking and the ablation report. One JSON
// config file with flat dotted keys drives everything; flags win over the
// file. Every run writes a manifest next to its artifacts.
//
// Exit codes: 0 success, 1 config/runtime error, 2 usage.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gkd/checkpoint.hpp"
#include "gkd/experiment.hpp"
#include "gkd/runconfig.hpp"
#include "gkd/tape.hpp"
#include "gkd/train.hpp"

namespace fs = std::filesystem;
using namespace gkd;

namespace {

void write_text(const std::string& path, const std::string& text) {
  if (fs::path(path).has_parent_path()) {
    fs::create_directories(fs::path(path).parent_path());
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

void write_manifest(const std::string& artifact, const std::string& command,
                    const RunConfig& cfg, const std::string& metrics_json) {
  write_text(artifact + ".manifest.json",
             make_manifest(command, run_config_to_json(cfg), cfg.seed,
                           metrics_json));
}

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  if (out.empty()) throw std::invalid_argument("empty list '" + csv + "'");
  return out;
}

// The dataset carries everything the model shape depends on; trust it over
// whatever num_classes/dataset_mode the config happens to hold.
void adopt_dataset_shape(const std::vector<VideoSample>& data,
                         TrainConfig& cfg) {
  if (data.empty()) throw std::runtime_error("dataset is empty");
  if (data.front().multi_label()) {
    cfg.dataset_mode = DatasetMode::multi_label;
    cfg.num_classes = static_cast<int>(data.front().labels.size());
  } else {
    cfg.dataset_mode = DatasetMode::single_label;
    int k = 0;
    for (const VideoSample& v : data) k = std::max(k, v.label + 1);
    cfg.num_classes = std::max(cfg.num_classes, k);
  }
}

// Deterministic stride split: every 4th video held out for evaluation.
// Videos cycle through classes and subjects, so both splits stay balanced.
void stride_split(const std::vector<VideoSample>& data,
                  std::vector<VideoSample>& train,
                  std::vector<VideoSample>& eval_split) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    (i % 4 == 3 ? eval_split : train).push_back(data[i]);
  }
}

std::string metrics_json_for(const EvalReport& rep) { return rep.to_json(); }

std::vector<VideoSample> load_data(const RunConfig& cfg) {
  if (cfg.data_in.empty()) {
    throw std::runtime_error("no input dataset: pass --data or paths.data_in");
  }
  auto data = read_jsonl(cfg.data_in);
  if (data.empty()) throw std::runtime_error(cfg.data_in + " holds no videos");
  return data;
}

struct Flags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out, data, teacher, model, context, loss, metric;
  std::optional<double> temperature, lambda2;
  std::string t_list = "2,5,10,20";
  std::string l2_list = "0.3,0.5,0.7";
  bool subjects_loocv = false;
};

// Config file first, then flags on top.
RunConfig resolve(const Flags& f) {
  RunConfig cfg;
  if (!f.config_path.empty()) cfg = load_run_config(f.config_path);
  if (f.seed) apply_config_key(cfg, "seed", std::to_string(*f.seed));
  if (f.data) cfg.data_in = *f.data;
  if (f.model) cfg.model_in = *f.model;
  if (f.teacher) cfg.model_in = *f.teacher;
  if (f.out) {
    cfg.model_out = *f.out;
    cfg.report_out = *f.out;
  }
  if (f.context) apply_config_key(cfg, "train.context", *f.context);
  if (f.loss) apply_config_key(cfg, "distill.loss_kind", *f.loss);
  if (f.temperature) cfg.distill.temperature = *f.temperature;
  if (f.lambda2) {
    cfg.distill.lambda2 = *f.lambda2;
    cfg.distill.lambda1 = 1.0 - *f.lambda2;
  }
  return cfg;
}

int cmd_gen(const Flags& f) {
  RunConfig cfg = resolve(f);
  std::string out = f.out.value_or("data");
  fs::path p(out);
  if (out.back() == '/' || fs::is_directory(p) || p.extension().empty()) {
    p /= "dataset.jsonl";
  }
  auto data = generate(cfg.gen, cfg.seed);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  write_jsonl(data, p.string());
  std::ostringstream m;
  m << "{\"num_videos\": " << data.size() << ", \"mode\": \""
    << to_string(cfg.gen.mode) << "\"}";
  write_manifest(p.string(), "gen", cfg, m.str());
  std::cout << "wrote " << data.size() << " videos to " << p.string() << "\n";
  return 0;
}

int cmd_train(const Flags& f) {
  RunConfig cfg = resolve(f);
  auto data = load_data(cfg);
  adopt_dataset_shape(data, cfg.train);
  ModelState st = train_teacher(data, cfg.train);
  std::string out = cfg.model_out.empty() ? "model.json" : cfg.model_out;
  save_checkpoint(st, out);
  EvalReport rep = evaluate(st.model, data, cfg.train.dataset_mode);
  write_manifest(out, "train", cfg, metrics_json_for(rep));
  std::cout << "trained " << to_string(cfg.train.context) << " model ("
            << cfg.train.epochs << " epochs, final loss "
            << st.loss_trace.back() << ") -> " << out << "\n";
  return 0;
}

int cmd_distill(const Flags& f) {
  RunConfig cfg = resolve(f);
  if (cfg.model_in.empty()) {
    throw std::runtime_error("distill needs --teacher CHECKPOINT");
  }
  cfg.distill.validate();  // rejects teacher == student context up front
  ModelState teacher = load_checkpoint(cfg.model_in);
  if (teacher.model.context != cfg.distill.teacher_context) {
    throw std::runtime_error(
        "teacher checkpoint is " + to_string(teacher.model.context) +
        " but distill.teacher_context is " +
        to_string(cfg.distill.teacher_context));
  }
  auto data = load_data(cfg);
  adopt_dataset_shape(data, cfg.train);
  cfg.train.context = cfg.distill.student_context;
  ModelState st = train_student(data, teacher, cfg.train, cfg.distill);
  std::string out = cfg.model_out.empty() ? "student.json" : cfg.model_out;
  save_checkpoint(st, out);
  EvalReport rep = evaluate(st.model, data, cfg.train.dataset_mode);
  write_manifest(out, "distill", cfg, metrics_json_for(rep));
  std::cout << "distilled " << to_string(teacher.model.context) << " -> "
            << to_string(st.model.context) << " (T=" << cfg.distill.temperature
            << ", lambda2=" << cfg.distill.lambda2 << ") -> " << out << "\n";
  return 0;
}

int cmd_dml(const Flags& f) {
  RunConfig cfg = resolve(f);
  auto data = load_data(cfg);
  adopt_dataset_shape(data, cfg.train);
  TrainConfig ca = cfg.train, cb = cfg.train;
  ca.context = cfg.distill.student_context;
  cb.context = cfg.distill.teacher_context;
  auto [a, b] = train_dml(data, ca, cb, cfg.distill);
  fs::path base(cfg.model_out.empty() ? "dml.json" : cfg.model_out);
  fs::path pa = base.parent_path() / (base.stem().string() + ".a.json");
  fs::path pb = base.parent_path() / (base.stem().string() + ".b.json");
  save_checkpoint(a, pa.string());
  save_checkpoint(b, pb.string());
  EvalReport ra = evaluate(a.model, data, ca.dataset_mode);
  EvalReport rb = evaluate(b.model, data, cb.dataset_mode);
  std::ostringstream m;
  m << "{\"peer_a\": " << ra.to_json() << ", \"peer_b\": " << rb.to_json()
    << "}";
  write_manifest(pa.string(), "dml", cfg, m.str());
  std::cout << "dml peers " << to_string(ca.context) << "/"
            << to_string(cb.context) << " -> " << pa.string() << ", "
            << pb.string() << "\n";
  return 0;
}

int cmd_eval(const Flags& f) {
  RunConfig cfg = resolve(f);
  auto data = load_data(cfg);
  std::string metric = f.metric.value_or("accuracy");
  if (metric != "map" && metric != "accuracy" && metric != "confusion") {
    throw std::runtime_error("unknown metric '" + metric + "'");
  }

  if (f.subjects_loocv) {
    adopt_dataset_shape(data, cfg.train);
    std::optional<DistillConfig> dcfg;
    LoocvResult r = loocv(data, cfg.train, dcfg);
    std::ostringstream m;
    m << "{\"mean_accuracy\": " << r.mean_accuracy << ", \"folds\": [";
    for (std::size_t i = 0; i < r.folds.size(); ++i) {
      if (i) m << ", ";
      m << "{\"subject\": \"" << r.folds[i].subject
        << "\", \"accuracy\": " << r.folds[i].accuracy
        << ", \"n_test\": " << r.folds[i].n_test << "}";
      std::cout << "fold " << r.folds[i].subject << ": "
                << r.folds[i].accuracy << " (" << r.folds[i].n_test
                << " videos)\n";
    }
    m << "]}";
    std::cout << "loocv mean accuracy " << r.mean_accuracy << "\n";
    std::string out = cfg.report_out.empty() ? "loocv.json" : cfg.report_out;
    write_text(out, m.str());
    write_manifest(out, "eval", cfg, m.str());
    return 0;
  }

  if (cfg.model_in.empty()) {
    throw std::runtime_error("eval needs --model CHECKPOINT");
  }
  ModelState st = load_checkpoint(cfg.model_in);
  DatasetMode mode = data.front().multi_label() ? DatasetMode::multi_label
                                                : DatasetMode::single_label;
  EvalReport rep = evaluate(st.model, data, mode);
  std::string out = cfg.report_out.empty() ? "report.json" : cfg.report_out;
  if (metric == "confusion") {
    write_text(out, rep.confusion_csv());
    std::cout << rep.confusion_csv();
  } else {
    write_text(out, rep.to_json());
    if (metric == "map" && rep.map) std::cout << "map " << *rep.map << "\n";
    if (metric == "accuracy" && rep.accuracy) {
      std::cout << "accuracy " << *rep.accuracy << "\n";
    }
  }
  write_manifest(out, "eval", cfg, rep.to_json());
  return 0;
}

int cmd_sweep(const Flags& f) {
  RunConfig cfg = resolve(f);
  auto data = load_data(cfg);
  std::vector<VideoSample> train, eval_split;
  stride_split(data, train, eval_split);
  adopt_dataset_shape(train, cfg.train);
  SweepResult r = run_sweep(train, eval_split, cfg.train, cfg.distill,
                            parse_list(f.t_list), parse_list(f.l2_list));
  std::string out = cfg.report_out.empty() ? "sweep.csv" : cfg.report_out;
  write_text(out, r.to_csv());
  std::ostringstream m;
  m << "{\"cells\": " << r.cells.size() << ", \"best_T\": "
    << r.best.temperature << ", \"best_lambda2\": " << r.best.lambda2
    << ", \"best_metric\": " << r.best.metric << "}";
  write_manifest(out, "sweep", cfg, m.str());
  std::cout << r.to_csv();
  std::cout << "best: T=" << r.best.temperature
            << " lambda2=" << r.best.lambda2 << " metric=" << r.best.metric
            << "\n";
  return 0;
}

int cmd_report(const Flags& f) {
  RunConfig cfg = resolve(f);
  auto data = load_data(cfg);
  std::vector<VideoSample> train, eval_split;
  stride_split(data, train, eval_split);
  adopt_dataset_shape(train, cfg.train);
  AblationReport r = run_report(train, eval_split, cfg.train, cfg.distill);
  std::string out = cfg.report_out.empty() ? "report.csv" : cfg.report_out;
  write_text(out, r.to_csv());
  std::ostringstream m;
  m << "{\"rows\": " << r.rows.size() << "}";
  write_manifest(out, "report", cfg, m.str());
  std::cout << r.to_text();
  return 0;
}

// Randomized gradient checks over the fully composed student loss, both
// context pairings and both loss kinds.
int cmd_gradcheck(const Flags& f) {
  RunConfig cfg = resolve(f);
  GenConfig g;
  g.num_videos = 4;
  g.frames_per_video = 4;
  g.objects_per_frame = 2;
  g.num_object_types = 2;
  auto data = generate(g, cfg.seed + 17);

  double worst = 0.0;
  Rng rng(cfg.seed + 99);
  for (DistillLoss kind : {DistillLoss::l2, DistillLoss::kl}) {
    for (ContextKind sc : {ContextKind::local, ContextKind::global_ctx}) {
      ContextKind tc = sc == ContextKind::local ? ContextKind::global_ctx
                                                : ContextKind::local;
      Model teacher = init_model(tc, g.feature_dim(), 5, 1,
                                 g.num_classes(), rng);
      Model student = init_model(sc, g.feature_dim(), 5, 1,
                                 g.num_classes(), rng);
      const VideoSample& video = data[rng.next_below(data.size())];
      Tape tt;
      Array tlogits = tt.value(model_forward(tt, teacher, video));

      DistillConfig dc = cfg.distill;
      dc.loss_kind = kind;
      dc.teacher_context = tc;
      dc.student_context = sc;
      // params in model_params order: layer weight, layer attn, head w, head b
      std::vector<Array> params;
      for (const Array* p : model_params(student)) params.push_back(*p);
      AssembledNodes nodes = assemble_nodes(video);
      GraphMask mask = sc == ContextKind::local
                           ? local_mask(nodes.frame_index)
                           : global_mask(nodes.h.rows());
      auto loss_fn = [&](Tape& t, const std::vector<Tape::VarId>& p) {
        Tape::VarId h = t.input(nodes.h);
        Tape::VarId cur = gat_layer(t, h, p[0], p[1],
                                    student.layers[0].leaky_slope, mask);
        Tape::VarId logits = classify(t, cur, p[2], p[3]);
        Tape::VarId hard = t.cross_entropy(logits,
                                           static_cast<std::size_t>(video.label));
        Tape::VarId soft = distill_loss(t, dc, tlogits, logits);
        return student_objective(t, hard, soft, dc.lambda1, dc.lambda2);
      };
      double err = grad_check(loss_fn, params, 1e-5);
      worst = std::max(worst, err);
      std::cout << "gradcheck " << to_string(kind) << " student="
                << to_string(sc) << ": max rel err " << err << "\n";
    }
  }
  std::cout << "worst relative error " << worst << "\n";
  return worst < 1e-4 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph-attention models with knowledge distillation"};
  app.require_subcommand(1);
  Flags f;

  auto add_common = [&](CLI::App* c) {
    c->add_option("--config", f.config_path, "JSON config with dotted keys");
    c->add_option("--seed", f.seed, "RNG seed (overrides config)");
    c->add_option("--out", f.out, "output path");
  };

  CLI::App* gen = app.add_subcommand("gen", "generate a synthetic dataset");
  add_common(gen);

  CLI::App* train = app.add_subcommand("train", "train a single-context model");
  add_common(train);
  train->add_option("--data", f.data, "input dataset (jsonl)");
  train->add_option("--context", f.context, "baseline|local|global");

  CLI::App* dis = app.add_subcommand("distill", "train a distilled student");
  add_common(dis);
  dis->add_option("--data", f.data, "input dataset (jsonl)");
  dis->add_option("--teacher", f.teacher, "teacher checkpoint");
  dis->add_option("--T", f.temperature, "distillation temperature");
  dis->add_option("--lambda2", f.lambda2, "distill weight (lambda1 = 1 - it)");
  dis->add_option("--loss", f.loss, "l2|kl");

  CLI::App* dml = app.add_subcommand("dml", "train two mutual-learning peers");
  add_common(dml);
  dml->add_option("--data", f.data, "input dataset (jsonl)");
  dml->add_option("--T", f.temperature, "distillation temperature");
  dml->add_option("--lambda2", f.lambda2, "distill weight");
  dml->add_option("--loss", f.loss, "l2|kl");

  CLI::App* ev = app.add_subcommand("eval", "evaluate a checkpoint");
  add_common(ev);
  ev->add_option("--data", f.data, "input dataset (jsonl)");
  ev->add_option("--model", f.model, "checkpoint to evaluate");
  ev->add_option("--metric", f.metric, "map|accuracy|confusion");
  ev->add_flag("--subjects-loocv", f.subjects_loocv,
               "leave-one-subject-out cross-validation instead");

  CLI::App* sw = app.add_subcommand("sweep", "grid over (T, lambda2)");
  add_common(sw);
  sw->add_option("--data", f.data, "input dataset (jsonl)");
  sw->add_option("--T", f.t_list, "comma-separated temperatures");
  sw->add_option("--lambda2", f.l2_list, "comma-separated lambda2 values");

  CLI::App* gc = app.add_subcommand("gradcheck", "finite-difference audit");
  add_common(gc);

  CLI::App* rep = app.add_subcommand("report", "ablation table");
  add_common(rep);
  rep->add_option("--data", f.data, "input dataset (jsonl)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return cmd_gen(f);
    if (train->parsed()) return cmd_train(f);
    if (dis->parsed()) return cmd_distill(f);
    if (dml->parsed()) return cmd_dml(f);
    if (ev->parsed()) return cmd_eval(f);
    if (sw->parsed()) return cmd_sweep(f);
    if (gc->parsed()) return cmd_gradcheck(f);
    if (rep->parsed()) return cmd_report(f);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
