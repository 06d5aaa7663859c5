#include "gkd/runconfig.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace gkd {

namespace {

std::string unquote(const std::string& v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
    return v.substr(1, v.size() - 2);
  }
  return v;
}

int to_int(const std::string& v) { return std::stoi(v); }
double to_double(const std::string& v) { return std::stod(v); }
std::uint64_t to_u64(const std::string& v) { return std::stoull(v); }
bool to_bool(const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("expected boolean, got '" + v + "'");
}

}  // namespace

void apply_config_key(RunConfig& cfg, const std::string& key,
                      const std::string& raw) {
  const std::string v = unquote(raw);
  // gen.*
  if (key == "gen.num_videos") cfg.gen.num_videos = to_int(v);
  else if (key == "gen.frames_per_video") cfg.gen.frames_per_video = to_int(v);
  else if (key == "gen.num_object_types") cfg.gen.num_object_types = to_int(v);
  else if (key == "gen.objects_per_frame") cfg.gen.objects_per_frame = to_int(v);
  else if (key == "gen.feature_noise_sigma") cfg.gen.feature_noise_sigma = to_double(v);
  else if (key == "gen.arena_size") cfg.gen.arena_size = to_double(v);
  else if (key == "gen.mode") cfg.gen.mode = dataset_mode_from_string(v);
  else if (key == "gen.proximity_radius") cfg.gen.proximity_radius = to_double(v);
  // train.*
  else if (key == "train.optimizer") cfg.train.optimizer = optimizer_from_string(v);
  else if (key == "train.base_lr") cfg.train.base_lr = to_double(v);
  else if (key == "train.epochs") cfg.train.epochs = to_int(v);
  else if (key == "train.decay_every") cfg.train.decay_every = to_int(v);
  else if (key == "train.decay_factor") cfg.train.decay_factor = to_double(v);
  else if (key == "train.batch_size") cfg.train.batch_size = to_int(v);
  else if (key == "train.context") cfg.train.context = context_from_string(v);
  else if (key == "train.dataset_mode") cfg.train.dataset_mode = dataset_mode_from_string(v);
  else if (key == "train.hidden_dim") cfg.train.hidden_dim = to_int(v);
  else if (key == "train.gat_layers") cfg.train.gat_layers = to_int(v);
  else if (key == "train.num_classes") cfg.train.num_classes = to_int(v);
  else if (key == "train.clip_norm") cfg.train.clip_norm = to_double(v);
  // distill.*
  else if (key == "distill.temperature") cfg.distill.temperature = to_double(v);
  else if (key == "distill.lambda1") cfg.distill.lambda1 = to_double(v);
  else if (key == "distill.lambda2") cfg.distill.lambda2 = to_double(v);
  else if (key == "distill.loss_kind") cfg.distill.loss_kind = distill_loss_from_string(v);
  else if (key == "distill.teacher_context") cfg.distill.teacher_context = context_from_string(v);
  else if (key == "distill.student_context") cfg.distill.student_context = context_from_string(v);
  else if (key == "distill.literal_sigmoid_sign") cfg.distill.literal_sigmoid_sign = to_bool(v);
  else if (key == "distill.literal_unsquared") cfg.distill.literal_unsquared = to_bool(v);
  else if (key == "distill.t_squared_rescale") cfg.distill.t_squared_rescale = to_bool(v);
  // paths & seed
  else if (key == "paths.data_in") cfg.data_in = v;
  else if (key == "paths.model_in") cfg.model_in = v;
  else if (key == "paths.model_out") cfg.model_out = v;
  else if (key == "paths.report_out") cfg.report_out = v;
  else if (key == "seed") {
    cfg.seed = to_u64(v);
    cfg.train.seed = cfg.seed;
  } else {
    throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

RunConfig parse_run_config(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  if (!j.is_object()) {
    throw std::invalid_argument("config must be a JSON object");
  }
  RunConfig cfg;
  for (const auto& [key, value] : j.items()) {
    apply_config_key(cfg, key, value.dump());
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_run_config(ss.str());
}

std::string run_config_to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["gen.num_videos"] = c.gen.num_videos;
  j["gen.frames_per_video"] = c.gen.frames_per_video;
  j["gen.num_object_types"] = c.gen.num_object_types;
  j["gen.objects_per_frame"] = c.gen.objects_per_frame;
  j["gen.feature_noise_sigma"] = c.gen.feature_noise_sigma;
  j["gen.arena_size"] = c.gen.arena_size;
  j["gen.mode"] = to_string(c.gen.mode);
  j["gen.proximity_radius"] = c.gen.proximity_radius;
  j["train.optimizer"] = to_string(c.train.optimizer);
  j["train.base_lr"] = c.train.base_lr;
  j["train.epochs"] = c.train.epochs;
  j["train.decay_every"] = c.train.decay_every;
  j["train.decay_factor"] = c.train.decay_factor;
  j["train.batch_size"] = c.train.batch_size;
  j["train.context"] = to_string(c.train.context);
  j["train.dataset_mode"] = to_string(c.train.dataset_mode);
  j["train.hidden_dim"] = c.train.hidden_dim;
  j["train.gat_layers"] = c.train.gat_layers;
  j["train.num_classes"] = c.train.num_classes;
  j["train.clip_norm"] = c.train.clip_norm;
  j["distill.temperature"] = c.distill.temperature;
  j["distill.lambda1"] = c.distill.lambda1;
  j["distill.lambda2"] = c.distill.lambda2;
  j["distill.loss_kind"] = to_string(c.distill.loss_kind);
  j["distill.teacher_context"] = to_string(c.distill.teacher_context);
  j["distill.student_context"] = to_string(c.distill.student_context);
  j["distill.literal_sigmoid_sign"] = c.distill.literal_sigmoid_sign;
  j["distill.literal_unsquared"] = c.distill.literal_unsquared;
  j["distill.t_squared_rescale"] = c.distill.t_squared_rescale;
  j["paths.data_in"] = c.data_in;
  j["paths.model_in"] = c.model_in;
  j["paths.model_out"] = c.model_out;
  j["paths.report_out"] = c.report_out;
  j["seed"] = c.seed;
  return j.dump(2);
}

}  // namespace gkd
