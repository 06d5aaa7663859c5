#pragma once

#include <vector>

#include "gkd/rng.hpp"
#include "gkd/tape.hpp"

namespace gkd {

// One masked attention layer: shared node transform W, attention vector a
// (length 2*d_out), LeakyReLU slope for the score nonlinearity.
struct GatParams {
  Array weight;  // d_out x d_in
  Array attn;    // 2 * d_out
  double leaky_slope = 0.2;

  std::size_t d_in() const { return weight.cols(); }
  std::size_t d_out() const { return weight.rows(); }
  void validate() const;
};

// Glorot-uniform init: [-s, s] with s = sqrt(6 / (fan_in + fan_out)).
GatParams init_gat_params(std::size_t d_in, std::size_t d_out, Rng& rng,
                          double leaky_slope = 0.2);

// score[i][j] = LeakyReLU(a · [W h_i ; W h_j]) where the mask is true;
// masked-out entries carry a -inf sentinel. Factorized as a1·Wh_i + a2·Wh_j,
// so W h is computed once per node.
Tape::VarId pairwise_scores(Tape& tape, Tape::VarId h, Tape::VarId weight,
                            Tape::VarId attn, double leaky_slope,
                            const GraphMask& mask);

// One attention layer: row i of the output is sum_j alpha[i][j] * (W h_j).
Tape::VarId gat_layer(Tape& tape, Tape::VarId h, Tape::VarId weight,
                      Tape::VarId attn, double leaky_slope,
                      const GraphMask& mask);

struct GatLayerVars {
  Tape::VarId weight;
  Tape::VarId attn;
};

// Sequential layers over the same mask, LeakyReLU(0.2) between layers,
// none after the last. Empty layer list is the identity.
Tape::VarId gat_stack(Tape& tape, Tape::VarId h,
                      const std::vector<GatParams>& layers,
                      const GraphMask& mask,
                      std::vector<GatLayerVars>* param_vars = nullptr);

inline constexpr double kInterLayerSlope = 0.2;

}  // namespace gkd
