#include "gkd/synthdata.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "gkd/array.hpp"
#include "gkd/rng.hpp"

namespace gkd {

std::string to_string(DatasetMode m) {
  return m == DatasetMode::single_label ? "single_label" : "multi_label";
}

DatasetMode dataset_mode_from_string(const std::string& s) {
  if (s == "single_label") return DatasetMode::single_label;
  if (s == "multi_label") return DatasetMode::multi_label;
  throw std::invalid_argument("unknown dataset mode '" + s + "'");
}

void GenConfig::validate() const {
  if (num_videos < 1) throw std::invalid_argument("GenConfig: num_videos < 1");
  if (frames_per_video < 2) {
    throw std::invalid_argument("GenConfig: frames_per_video must be >= 2");
  }
  if (num_object_types < 2) {
    throw std::invalid_argument("GenConfig: num_object_types must be >= 2");
  }
  if (objects_per_frame < 2) {
    throw std::invalid_argument("GenConfig: objects_per_frame must be >= 2");
  }
  if (num_object_types > objects_per_frame) {
    throw std::invalid_argument(
        "GenConfig: infeasible, num_object_types exceeds objects_per_frame");
  }
  if (feature_noise_sigma < 0.0) {
    throw std::invalid_argument("GenConfig: negative noise sigma");
  }
  if (arena_size <= 0.0) throw std::invalid_argument("GenConfig: arena_size <= 0");
  if (proximity_radius <= 0.0) {
    throw std::invalid_argument("GenConfig: proximity_radius <= 0");
  }
}

namespace {

struct Vec2 {
  double x = 0.0, y = 0.0;
};

double dist(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

double clampv(double v, double lo, double hi) {
  return v < lo ? lo : (v > hi ? hi : v);
}

Vec2 box_center(const Box& b) {
  return {(b.x1 + b.x2) / 2.0, (b.y1 + b.y2) / 2.0};
}

// Geometric labeling rule shared by the generator and the relabel oracles:
// the target is the object instance whose human distance changed most from
// the first to the last frame; the sign of that change is the direction.
// Positions are taken from box centers (noise-free).

std::vector<Vec2> frame_centers(const Frame& f) {
  std::vector<Vec2> out;
  out.reserve(f.nodes.size());
  for (const NodeObs& n : f.nodes) {
    if (!n.box) {
      throw std::invalid_argument("labeling rule requires boxes");
    }
    out.push_back(box_center(*n.box));
  }
  return out;
}

struct Derived {
  std::size_t node = 0;  // index in frame.nodes
  int type = 0;
  bool retreat = false;
};

Derived derive_single(const VideoSample& v) {
  const Frame& first = v.frames.front();
  const Frame& last = v.frames.back();
  std::vector<Vec2> c0 = frame_centers(first);
  std::vector<Vec2> c1 = frame_centers(last);
  std::size_t human = 0;
  bool found = false;
  for (std::size_t i = 0; i < first.nodes.size(); ++i) {
    if (first.nodes[i].type == 0) {
      human = i;
      found = true;
      break;
    }
  }
  if (!found) throw std::invalid_argument("video " + v.id + ": no human node");
  Derived d;
  double best = -1.0;
  for (std::size_t i = 0; i < first.nodes.size(); ++i) {
    if (first.nodes[i].type == 0) continue;
    double delta = dist(c1[human], c1[i]) - dist(c0[human], c0[i]);
    if (std::abs(delta) > best) {
      best = std::abs(delta);
      d.node = i;
      d.type = first.nodes[i].type;
      d.retreat = delta > 0.0;
    }
  }
  return d;
}

}  // namespace

int relabel_single(const VideoSample& v, int num_object_types) {
  Derived d = derive_single(v);
  (void)num_object_types;
  return (d.type - 1) * 2 + (d.retreat ? 1 : 0);
}

std::vector<int> relabel_multi(const VideoSample& v, int num_object_types,
                               double proximity_radius) {
  int t_frames = static_cast<int>(v.frames.size());
  int needed = (t_frames + 2) / 3;  // ceil(T/3)
  std::vector<int> near_count;
  std::vector<int> labels(num_object_types, 0);
  for (const Frame& f : v.frames) {
    std::vector<Vec2> c = frame_centers(f);
    std::size_t human = 0;
    for (std::size_t i = 0; i < f.nodes.size(); ++i) {
      if (f.nodes[i].type == 0) human = i;
    }
    std::vector<bool> type_near(num_object_types + 1, false);
    for (std::size_t i = 0; i < f.nodes.size(); ++i) {
      if (f.nodes[i].type == 0) continue;
      if (dist(c[human], c[i]) <= proximity_radius) {
        type_near[f.nodes[i].type] = true;
      }
    }
    if (near_count.empty()) near_count.assign(num_object_types + 1, 0);
    for (int t = 1; t <= num_object_types; ++t) {
      if (type_near[t]) near_count[t] += 1;
    }
  }
  for (int t = 1; t <= num_object_types; ++t) {
    labels[t - 1] = near_count[t] >= needed ? 1 : 0;
  }
  return labels;
}

std::vector<VideoSample> generate(const GenConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const int t_frames = cfg.frames_per_video;
  const int n_obj = cfg.objects_per_frame;
  const int m = cfg.num_object_types;
  const double arena = cfg.arena_size;
  // Margins are chosen so the target's distance change structurally
  // dominates: the human stands still, so a distractor's distance to the
  // human changes by at most its own drift, (T-1) * vmax * sqrt(2) ~
  // 0.13 * arena, while the target covers ~0.35-0.4 * arena.
  const double vmax = arena / (10.0 * t_frames);
  const double approach_step = 1.4 * arena / t_frames;
  const double retreat_step = 0.38 * arena / t_frames;
  const double stop_margin = 0.05 * arena;  // approach halts just short
  const double box_r = arena / 20.0;
  const double vel_scale = arena / t_frames;

  std::vector<VideoSample> out;
  out.reserve(static_cast<std::size_t>(cfg.num_videos));

  for (int vi = 0; vi < cfg.num_videos; ++vi) {
    // Independent substream per video; trajectory draws come first, noise
    // draws last (fixed consumption order, part of the format contract).
    Rng rng(derive_stream_seed(seed, static_cast<std::uint64_t>(vi)));

    std::vector<int> types(n_obj);
    for (int i = 0; i < n_obj; ++i) types[i] = 1 + i % m;

    int target_type = 1 + static_cast<int>(rng.next_below(m));
    bool retreat = rng.next_below(2) == 1;
    std::vector<int> cands;
    for (int i = 0; i < n_obj; ++i) {
      if (types[i] == target_type) cands.push_back(i);
    }
    int target = cands[rng.next_below(cands.size())];

    double theta = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
    Vec2 target_pos{rng.uniform(0.3 * arena, 0.7 * arena),
                    rng.uniform(0.3 * arena, 0.7 * arena)};
    double d0 = retreat ? 0.06 * arena : 0.45 * arena;
    Vec2 human{clampv(target_pos.x + d0 * std::cos(theta), 0.0, arena),
               clampv(target_pos.y + d0 * std::sin(theta), 0.0, arena)};

    std::vector<Vec2> obj_pos(n_obj), obj_vel(n_obj);
    for (int i = 0; i < n_obj; ++i) {
      if (i == target) {
        obj_pos[i] = target_pos;
      } else {
        // keep distractors well away from the (stationary) human so
        // nearest-object votes and distance-change margins stay unambiguous
        Vec2 p;
        for (int tries = 0; tries < 100; ++tries) {
          p = {rng.uniform(0.0, arena), rng.uniform(0.0, arena)};
          if (dist(p, human) >= 0.45 * arena && dist(p, target_pos) >= 0.2 * arena) {
            break;
          }
        }
        obj_pos[i] = p;
      }
      obj_vel[i] = {rng.uniform(-vmax, vmax), rng.uniform(-vmax, vmax)};
    }

    // simulate (no PRNG draws here)
    VideoSample sample;
    sample.id = "v" + std::to_string(vi);
    sample.subject = "S" + std::to_string(vi % 4 + 1);
    Vec2 target_vel{0.0, 0.0};
    for (int t = 0; t < t_frames; ++t) {
      Frame frame;
      frame.t = t;
      auto push_node = [&](int type, Vec2 pos, Vec2 vel) {
        NodeObs node;
        node.type = type;
        node.box = Box{pos.x - box_r, pos.y - box_r, pos.x + box_r, pos.y + box_r};
        node.feat.assign(static_cast<std::size_t>(cfg.feature_dim()), 0.0);
        node.feat[static_cast<std::size_t>(type)] = 1.0;
        std::size_t base = static_cast<std::size_t>(m) + 1;
        node.feat[base + 0] = pos.x / arena;
        node.feat[base + 1] = pos.y / arena;
        node.feat[base + 2] = vel.x / vel_scale;
        node.feat[base + 3] = vel.y / vel_scale;
        frame.nodes.push_back(std::move(node));
      };
      push_node(0, human, Vec2{0.0, 0.0});
      for (int i = 0; i < n_obj; ++i) {
        push_node(types[i], obj_pos[i], i == target ? target_vel : obj_vel[i]);
      }
      sample.frames.push_back(std::move(frame));

      // advance to the next frame: the target moves along the line to the
      // stationary human, everything else drifts
      Vec2 to_human{human.x - obj_pos[target].x, human.y - obj_pos[target].y};
      double d = std::hypot(to_human.x, to_human.y);
      Vec2 step{0.0, 0.0};
      if (d > 1e-9) {
        double len = retreat ? -retreat_step
                             : std::min(approach_step,
                                        std::max(d - stop_margin, 0.0));
        step = {to_human.x / d * len, to_human.y / d * len};
      }
      Vec2 next{clampv(obj_pos[target].x + step.x, 0.0, arena),
                clampv(obj_pos[target].y + step.y, 0.0, arena)};
      target_vel = {next.x - obj_pos[target].x, next.y - obj_pos[target].y};
      obj_pos[target] = next;
      for (int i = 0; i < n_obj; ++i) {
        if (i == target) continue;
        obj_pos[i].x += obj_vel[i].x;
        obj_pos[i].y += obj_vel[i].y;
        if (obj_pos[i].x < 0.0 || obj_pos[i].x > arena) {
          obj_vel[i].x = -obj_vel[i].x;
          obj_pos[i].x = clampv(obj_pos[i].x, 0.0, arena);
        }
        if (obj_pos[i].y < 0.0 || obj_pos[i].y > arena) {
          obj_vel[i].y = -obj_vel[i].y;
          obj_pos[i].y = clampv(obj_pos[i].y, 0.0, arena);
        }
      }
    }

    // labels from the emitted geometry, never from the intent
    if (cfg.mode == DatasetMode::single_label) {
      sample.label = relabel_single(sample, m);
    } else {
      sample.labels = relabel_multi(sample, m, cfg.proximity_radius);
    }

    // noise draws last: frame-major, node-major, component-major
    if (cfg.feature_noise_sigma > 0.0) {
      for (Frame& frame : sample.frames) {
        for (NodeObs& node : frame.nodes) {
          for (double& f : node.feat) {
            f += cfg.feature_noise_sigma * rng.gaussian();
          }
        }
      }
    }

    out.push_back(std::move(sample));
  }
  return out;
}

namespace {

void append_double(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

void append_video_json(std::string& out, const VideoSample& v) {
  out += "{\"id\":\"" + v.id + "\",\"subject\":\"" + v.subject + "\",";
  if (v.multi_label()) {
    out += "\"labels\":[";
    for (std::size_t i = 0; i < v.labels.size(); ++i) {
      if (i) out += ",";
      out += std::to_string(v.labels[i]);
    }
    out += "],";
  } else {
    out += "\"label\":" + std::to_string(v.label) + ",";
  }
  out += "\"frames\":[";
  for (std::size_t fi = 0; fi < v.frames.size(); ++fi) {
    const Frame& f = v.frames[fi];
    if (fi) out += ",";
    out += "{\"t\":" + std::to_string(f.t) + ",\"nodes\":[";
    for (std::size_t ni = 0; ni < f.nodes.size(); ++ni) {
      const NodeObs& n = f.nodes[ni];
      if (ni) out += ",";
      out += "{\"type\":" + std::to_string(n.type);
      if (n.box) {
        out += ",\"box\":[";
        append_double(out, n.box->x1);
        out += ",";
        append_double(out, n.box->y1);
        out += ",";
        append_double(out, n.box->x2);
        out += ",";
        append_double(out, n.box->y2);
        out += "]";
      }
      out += ",\"feat\":[";
      for (std::size_t j = 0; j < n.feat.size(); ++j) {
        if (j) out += ",";
        append_double(out, n.feat[j]);
      }
      out += "]}";
    }
    out += "]}";
  }
  out += "]}";
}

}  // namespace

void write_jsonl(const std::vector<VideoSample>& dataset,
                 const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  std::string line;
  for (const VideoSample& v : dataset) {
    line.clear();
    append_video_json(line, v);
    line += "\n";
    f << line;
  }
  if (!f) throw std::runtime_error("write failed: " + path);
}

std::vector<VideoSample> read_jsonl(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::vector<VideoSample> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": malformed JSON: " + e.what());
    }
    auto fail = [&](const std::string& msg) -> std::runtime_error {
      return std::runtime_error(path + ":" + std::to_string(lineno) + ": " + msg);
    };
    if (!j.contains("frames") || !j["frames"].is_array()) {
      throw fail("schema error: missing \"frames\"");
    }
    VideoSample v;
    v.id = j.value("id", "");
    v.subject = j.value("subject", "");
    if (j.contains("labels")) {
      v.labels = j["labels"].get<std::vector<int>>();
    } else if (j.contains("label")) {
      v.label = j["label"].get<int>();
    } else {
      throw fail("schema error: missing \"label\" or \"labels\"");
    }
    std::size_t width = 0;
    for (const auto& jf : j["frames"]) {
      Frame frame;
      frame.t = jf.value("t", 0);
      if (!jf.contains("nodes") || !jf["nodes"].is_array()) {
        throw fail("schema error: frame missing \"nodes\"");
      }
      for (const auto& jn : jf["nodes"]) {
        NodeObs node;
        if (!jn.contains("type") || !jn.contains("feat")) {
          throw fail("schema error: node missing \"type\" or \"feat\"");
        }
        node.type = jn["type"].get<int>();
        node.feat = jn["feat"].get<std::vector<double>>();
        if (width == 0) width = node.feat.size();
        if (node.feat.size() != width) {
          throw fail("schema error: feature width " +
                     std::to_string(node.feat.size()) + " vs " +
                     std::to_string(width));
        }
        if (jn.contains("box")) {
          auto b = jn["box"].get<std::vector<double>>();
          if (b.size() != 4) throw fail("schema error: box needs 4 floats");
          node.box = Box{b[0], b[1], b[2], b[3]};
        }
        frame.nodes.push_back(std::move(node));
      }
      v.frames.push_back(std::move(frame));
    }
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace gkd
