#pragma once

#include <string>
#include <vector>

#include "gkd/gat.hpp"
#include "gkd/graph_mask.hpp"
#include "gkd/video.hpp"

namespace gkd {

enum class ContextKind { baseline, local, global_ctx };

std::string to_string(ContextKind k);
ContextKind context_from_string(const std::string& s);

struct ClassifierHead {
  Array weight;  // k x d
  Array bias;    // k
};

ClassifierHead init_head(std::size_t d, std::size_t k, Rng& rng);

// Nodes concatenated frame-major; frame_index[i] is the owning frame.
struct AssembledNodes {
  Array h;  // N x d
  std::vector<int> frame_index;
};

AssembledNodes assemble_nodes(const VideoSample& video);

GraphMask local_mask(const std::vector<int>& frame_index);
GraphMask global_mask(std::size_t n);

// logits = head.weight · mean_pool(H) + head.bias
Tape::VarId classify(Tape& tape, Tape::VarId h_out, Tape::VarId head_w,
                     Tape::VarId head_b);

// Ablation baseline: readout over raw assembled features, no graph layers.
inline Tape::VarId baseline_logits(Tape& tape, Tape::VarId h_raw,
                                   Tape::VarId head_w, Tape::VarId head_b) {
  return classify(tape, h_raw, head_w, head_b);
}

// The graph model: a GAT stack over the context mask plus the readout head.
// baseline has no layers and classifies pooled raw features directly.
struct Model {
  ContextKind context = ContextKind::baseline;
  std::vector<GatParams> layers;
  ClassifierHead head;
  std::size_t num_classes() const { return head.weight.rows(); }
};

Model init_model(ContextKind context, std::size_t d_in, std::size_t hidden,
                 std::size_t num_layers, std::size_t num_classes, Rng& rng);

// Tape variables of every learnable parameter, in a fixed enumeration order
// (layer weight, layer attn, ..., head weight, head bias).
struct ModelVars {
  std::vector<Tape::VarId> params;
};

// Forward pass for one video; returns the logits var.
Tape::VarId model_forward(Tape& tape, const Model& model,
                          const VideoSample& video, ModelVars* vars = nullptr);

// Deterministic parameter enumeration matching ModelVars order.
std::vector<Array*> model_params(Model& model);
std::vector<const Array*> model_params(const Model& model);

}  // namespace gkd
