#include "gkd/context.hpp"

#include <cmath>
#include <stdexcept>

namespace gkd {

void VideoSample::validate() const {
  if (frames.empty()) {
    throw std::invalid_argument("video " + id + ": no frames");
  }
  std::size_t d = 0;
  for (const Frame& f : frames) {
    if (f.nodes.empty()) {
      throw std::invalid_argument("video " + id + ": frame " +
                                  std::to_string(f.t) + " has no nodes");
    }
    for (const NodeObs& n : f.nodes) {
      if (d == 0) d = n.feat.size();
      if (n.feat.size() != d) {
        throw ShapeError("video " + id + ": feature width " +
                         std::to_string(n.feat.size()) + " vs " +
                         std::to_string(d));
      }
      if (n.box && !(n.box->x1 < n.box->x2 && n.box->y1 < n.box->y2)) {
        throw std::invalid_argument("video " + id + ": degenerate box");
      }
    }
  }
}

std::string to_string(ContextKind k) {
  switch (k) {
    case ContextKind::baseline: return "baseline";
    case ContextKind::local: return "local";
    case ContextKind::global_ctx: return "global";
  }
  return "?";
}

ContextKind context_from_string(const std::string& s) {
  if (s == "baseline") return ContextKind::baseline;
  if (s == "local") return ContextKind::local;
  if (s == "global") return ContextKind::global_ctx;
  throw std::invalid_argument("unknown context '" + s + "'");
}

ClassifierHead init_head(std::size_t d, std::size_t k, Rng& rng) {
  ClassifierHead h;
  double s = std::sqrt(6.0 / static_cast<double>(d + k));
  h.weight = Array::zeros({k, d});
  for (double& v : h.weight.data) v = rng.uniform(-s, s);
  h.bias = Array::zeros({k});
  return h;
}

AssembledNodes assemble_nodes(const VideoSample& video) {
  video.validate();
  std::size_t n = 0;
  for (const Frame& f : video.frames) n += f.nodes.size();
  std::size_t d = video.frames[0].nodes[0].feat.size();
  AssembledNodes out;
  out.h = Array::zeros({n, d});
  out.frame_index.reserve(n);
  std::size_t row = 0;
  for (std::size_t fi = 0; fi < video.frames.size(); ++fi) {
    for (const NodeObs& node : video.frames[fi].nodes) {
      for (std::size_t j = 0; j < d; ++j) out.h.data[row * d + j] = node.feat[j];
      out.frame_index.push_back(static_cast<int>(fi));
      ++row;
    }
  }
  return out;
}

GraphMask local_mask(const std::vector<int>& frame_index) {
  std::size_t n = frame_index.size();
  GraphMask m(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (frame_index[i] == frame_index[j]) m.set(i, j, true);
    }
  }
  return m;
}

GraphMask global_mask(std::size_t n) {
  if (n == 0) throw std::invalid_argument("global_mask: n must be >= 1");
  return GraphMask(n, true);
}

Tape::VarId classify(Tape& tape, Tape::VarId h_out, Tape::VarId head_w,
                     Tape::VarId head_b) {
  Tape::VarId pooled = tape.pool_mean(h_out);
  std::size_t d = tape.value(pooled).size();
  // reuse linear on a 1 x d view
  Array row({1, d}, tape.value(pooled).data);
  Tape::VarId as_row = tape.make_node(std::move(row), [pooled](Tape& t, Tape::VarId self) {
    const Array& g = t.grad(self);
    Array& gp = t.grad_ref(pooled);
    for (std::size_t i = 0; i < g.size(); ++i) gp.data[i] += g.data[i];
  });
  Tape::VarId logits_row = tape.linear(as_row, head_w);
  std::size_t k = tape.value(logits_row).cols();
  Array flat({k}, tape.value(logits_row).data);
  Tape::VarId flat_id =
      tape.make_node(std::move(flat), [logits_row](Tape& t, Tape::VarId self) {
        const Array& g = t.grad(self);
        Array& gl = t.grad_ref(logits_row);
        for (std::size_t i = 0; i < g.size(); ++i) gl.data[i] += g.data[i];
      });
  return tape.add(flat_id, head_b);
}

Model init_model(ContextKind context, std::size_t d_in, std::size_t hidden,
                 std::size_t num_layers, std::size_t num_classes, Rng& rng) {
  Model m;
  m.context = context;
  if (context != ContextKind::baseline) {
    std::size_t in = d_in;
    for (std::size_t l = 0; l < num_layers; ++l) {
      m.layers.push_back(init_gat_params(in, hidden, rng));
      in = hidden;
    }
  }
  std::size_t head_in = m.layers.empty() ? d_in : m.layers.back().d_out();
  m.head = init_head(head_in, num_classes, rng);
  return m;
}

Tape::VarId model_forward(Tape& tape, const Model& model,
                          const VideoSample& video, ModelVars* vars) {
  AssembledNodes nodes = assemble_nodes(video);
  std::size_t n = nodes.h.rows();
  Tape::VarId h = tape.input(std::move(nodes.h));

  Tape::VarId h_out = h;
  if (model.context != ContextKind::baseline) {
    GraphMask mask = model.context == ContextKind::local
                         ? local_mask(nodes.frame_index)
                         : global_mask(n);
    std::vector<GatLayerVars> layer_vars;
    h_out = gat_stack(tape, h, model.layers, mask, &layer_vars);
    if (vars) {
      for (const GatLayerVars& lv : layer_vars) {
        vars->params.push_back(lv.weight);
        vars->params.push_back(lv.attn);
      }
    }
  }
  Tape::VarId hw = tape.input(model.head.weight);
  Tape::VarId hb = tape.input(model.head.bias);
  if (vars) {
    vars->params.push_back(hw);
    vars->params.push_back(hb);
  }
  return classify(tape, h_out, hw, hb);
}

std::vector<Array*> model_params(Model& model) {
  std::vector<Array*> out;
  for (GatParams& p : model.layers) {
    out.push_back(&p.weight);
    out.push_back(&p.attn);
  }
  out.push_back(&model.head.weight);
  out.push_back(&model.head.bias);
  return out;
}

std::vector<const Array*> model_params(const Model& model) {
  std::vector<const Array*> out;
  for (const GatParams& p : model.layers) {
    out.push_back(&p.weight);
    out.push_back(&p.attn);
  }
  out.push_back(&model.head.weight);
  out.push_back(&model.head.bias);
  return out;
}

}  // namespace gkd
