#include "gkd/gat.hpp"

#include <cmath>
#include <limits>

namespace gkd {

void GatParams::validate() const {
  if (attn.size() != 2 * d_out()) {
    throw ShapeError("GatParams: attn " + shape_str(attn.shape) +
                     " must have length 2*" + std::to_string(d_out()));
  }
  if (leaky_slope < 0.0 || leaky_slope >= 1.0) {
    throw std::invalid_argument("GatParams: leaky_slope must be in [0,1)");
  }
}

GatParams init_gat_params(std::size_t d_in, std::size_t d_out, Rng& rng,
                          double leaky_slope) {
  GatParams p;
  double sw = std::sqrt(6.0 / static_cast<double>(d_in + d_out));
  p.weight = Array::zeros({d_out, d_in});
  for (double& v : p.weight.data) v = rng.uniform(-sw, sw);
  double sa = std::sqrt(6.0 / static_cast<double>(2 * d_out + 1));
  p.attn = Array::zeros({2 * d_out});
  for (double& v : p.attn.data) v = rng.uniform(-sa, sa);
  p.leaky_slope = leaky_slope;
  return p;
}

namespace {

// Splits the attention vector into its two halves on the tape.
std::pair<Tape::VarId, Tape::VarId> split_attn(Tape& tape, Tape::VarId attn) {
  const Array& a = tape.value(attn);
  std::size_t d = a.size() / 2;
  Array a1({d}, {a.data.begin(), a.data.begin() + static_cast<long>(d)});
  Array a2({d}, {a.data.begin() + static_cast<long>(d), a.data.end()});
  Tape::VarId i1 = tape.make_node(std::move(a1), [attn, d](Tape& t, Tape::VarId self) {
    const Array& g = t.grad(self);
    Array& ga = t.grad_ref(attn);
    for (std::size_t i = 0; i < d; ++i) ga.data[i] += g.data[i];
  });
  Tape::VarId i2 = tape.make_node(std::move(a2), [attn, d](Tape& t, Tape::VarId self) {
    const Array& g = t.grad(self);
    Array& ga = t.grad_ref(attn);
    for (std::size_t i = 0; i < d; ++i) ga.data[d + i] += g.data[i];
  });
  return {i1, i2};
}

Tape::VarId raw_scores(Tape& tape, Tape::VarId hw, Tape::VarId attn,
                       double leaky_slope) {
  auto [a1, a2] = split_attn(tape, attn);
  Tape::VarId s = tape.matvec(hw, a1);
  Tape::VarId t = tape.matvec(hw, a2);
  return tape.leaky_relu(tape.outer_sum(s, t), leaky_slope);
}

}  // namespace

Tape::VarId pairwise_scores(Tape& tape, Tape::VarId h, Tape::VarId weight,
                            Tape::VarId attn, double leaky_slope,
                            const GraphMask& mask) {
  std::size_t n = tape.value(h).rows();
  if (mask.n != n) {
    throw ShapeError("pairwise_scores: " + std::to_string(n) +
                     " nodes vs mask of size " + std::to_string(mask.n));
  }
  Tape::VarId hw = tape.linear(h, weight);
  Tape::VarId scores = raw_scores(tape, hw, attn, leaky_slope);
  return tape.mask_fill(scores, mask,
                        -std::numeric_limits<double>::infinity());
}

Tape::VarId gat_layer(Tape& tape, Tape::VarId h, Tape::VarId weight,
                      Tape::VarId attn, double leaky_slope,
                      const GraphMask& mask) {
  std::size_t n = tape.value(h).rows();
  if (mask.n != n) {
    throw ShapeError("gat_layer: " + std::to_string(n) +
                     " nodes vs mask of size " + std::to_string(mask.n));
  }
  Tape::VarId hw = tape.linear(h, weight);
  Tape::VarId scores = raw_scores(tape, hw, attn, leaky_slope);
  Tape::VarId alpha = tape.masked_softmax(scores, mask);
  return tape.matmul(alpha, hw);
}

Tape::VarId gat_stack(Tape& tape, Tape::VarId h,
                      const std::vector<GatParams>& layers,
                      const GraphMask& mask,
                      std::vector<GatLayerVars>* param_vars) {
  Tape::VarId cur = h;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const GatParams& p = layers[l];
    p.validate();
    if (tape.value(cur).cols() != p.d_in()) {
      throw ShapeError("gat_stack: layer " + std::to_string(l) + " expects " +
                       std::to_string(p.d_in()) + " inputs, got " +
                       shape_str(tape.value(cur).shape));
    }
    Tape::VarId w = tape.input(p.weight);
    Tape::VarId a = tape.input(p.attn);
    if (param_vars) param_vars->push_back({w, a});
    cur = gat_layer(tape, cur, w, a, p.leaky_slope, mask);
    if (l + 1 < layers.size()) {
      cur = tape.leaky_relu(cur, kInterLayerSlope);
    }
  }
  return cur;
}

}  // namespace gkd
