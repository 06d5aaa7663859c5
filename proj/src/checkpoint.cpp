#include "gkd/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace gkd {

namespace {

using json = nlohmann::ordered_json;

json array_to_json(const Array& a) {
  json j;
  j["shape"] = a.shape;
  j["data"] = a.data;
  return j;
}

Array array_from_json(const json& j) {
  return Array(j.at("shape").get<std::vector<std::size_t>>(),
               j.at("data").get<std::vector<double>>());
}

json config_to_json(const TrainConfig& c) {
  json j;
  j["optimizer"] = to_string(c.optimizer);
  j["base_lr"] = c.base_lr;
  j["epochs"] = c.epochs;
  j["decay_every"] = c.decay_every;
  j["decay_factor"] = c.decay_factor;
  j["batch_size"] = c.batch_size;
  j["seed"] = c.seed;
  j["context"] = to_string(c.context);
  j["dataset_mode"] = to_string(c.dataset_mode);
  j["hidden_dim"] = c.hidden_dim;
  j["gat_layers"] = c.gat_layers;
  j["num_classes"] = c.num_classes;
  j["clip_norm"] = c.clip_norm;
  return j;
}

TrainConfig config_from_json(const json& j) {
  TrainConfig c;
  c.optimizer = optimizer_from_string(j.at("optimizer").get<std::string>());
  c.base_lr = j.at("base_lr").get<double>();
  c.epochs = j.at("epochs").get<int>();
  c.decay_every = j.at("decay_every").get<int>();
  c.decay_factor = j.at("decay_factor").get<double>();
  c.batch_size = j.at("batch_size").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.context = context_from_string(j.at("context").get<std::string>());
  c.dataset_mode = dataset_mode_from_string(j.at("dataset_mode").get<std::string>());
  c.hidden_dim = j.at("hidden_dim").get<int>();
  c.gat_layers = j.at("gat_layers").get<int>();
  c.num_classes = j.at("num_classes").get<int>();
  c.clip_norm = j.at("clip_norm").get<double>();
  return c;
}

}  // namespace

std::string checkpoint_to_json(const ModelState& state) {
  json j;
  j["format"] = "gkd-checkpoint-v1";
  j["context"] = to_string(state.model.context);
  j["epoch"] = state.epoch;
  json layers = json::array();
  for (const GatParams& p : state.model.layers) {
    json lj;
    lj["weight"] = array_to_json(p.weight);
    lj["attn"] = array_to_json(p.attn);
    lj["leaky_slope"] = p.leaky_slope;
    layers.push_back(lj);
  }
  j["layers"] = layers;
  j["head"]["weight"] = array_to_json(state.model.head.weight);
  j["head"]["bias"] = array_to_json(state.model.head.bias);
  json opt;
  opt["kind"] = to_string(state.opt.kind);
  opt["step"] = state.opt.step;
  opt["m"] = json::array();
  opt["v"] = json::array();
  for (const Array& a : state.opt.m) opt["m"].push_back(array_to_json(a));
  for (const Array& a : state.opt.v) opt["v"].push_back(array_to_json(a));
  j["optimizer"] = opt;
  j["config"] = config_to_json(state.cfg);
  j["loss_trace"] = state.loss_trace;
  return j.dump(2);
}

ModelState checkpoint_from_json(const std::string& text) {
  json j = json::parse(text);
  if (j.value("format", "") != "gkd-checkpoint-v1") {
    throw std::runtime_error("not a recognized checkpoint document");
  }
  ModelState st;
  st.model.context = context_from_string(j.at("context").get<std::string>());
  st.epoch = j.at("epoch").get<int>();
  for (const json& lj : j.at("layers")) {
    GatParams p;
    p.weight = array_from_json(lj.at("weight"));
    p.attn = array_from_json(lj.at("attn"));
    p.leaky_slope = lj.at("leaky_slope").get<double>();
    st.model.layers.push_back(std::move(p));
  }
  st.model.head.weight = array_from_json(j.at("head").at("weight"));
  st.model.head.bias = array_from_json(j.at("head").at("bias"));
  const json& opt = j.at("optimizer");
  st.opt.kind = optimizer_from_string(opt.at("kind").get<std::string>());
  st.opt.step = opt.at("step").get<long>();
  for (const json& a : opt.at("m")) st.opt.m.push_back(array_from_json(a));
  for (const json& a : opt.at("v")) st.opt.v.push_back(array_from_json(a));
  st.cfg = config_from_json(j.at("config"));
  st.loss_trace = j.at("loss_trace").get<std::vector<double>>();
  return st;
}

void save_checkpoint(const ModelState& state, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << checkpoint_to_json(state) << "\n";
  if (!f) throw std::runtime_error("write failed: " + path);
}

ModelState load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return checkpoint_from_json(ss.str());
}

}  // namespace gkd
