#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "gkd/array.hpp"
#include "gkd/graph_mask.hpp"

namespace gkd {

// Reverse-mode tape. Operations append records in execution order, which is
// a topological order by construction; backward() walks the records once in
// reverse. Values are immutable after recording.
class Tape {
 public:
  using VarId = std::size_t;

  VarId input(Array value);

  const Array& value(VarId id) const { return records_[id].value; }
  const Array& grad(VarId id) const { return records_[id].grad; }
  std::size_t size() const { return records_.size(); }

  // y[i] = W x[i] (+ b);  x is n x d_in, W is d_out x d_in.
  VarId linear(VarId x, VarId w, std::optional<VarId> b = std::nullopt);
  VarId matmul(VarId a, VarId b);
  // A[n x d] · v[d] -> [n]
  VarId matvec(VarId a, VarId v);
  VarId leaky_relu(VarId x, double slope);
  VarId masked_softmax(VarId scores, const GraphMask& mask);
  // copies scores, writing `fill` into masked-out entries (zero gradient there)
  VarId mask_fill(VarId scores, const GraphMask& mask, double fill);
  VarId concat(VarId u, VarId v);
  VarId pool_mean(VarId x);
  VarId pool_max(VarId x);
  VarId cross_entropy(VarId logits, std::size_t label);
  VarId bce_with_logits(VarId logits, const std::vector<double>& targets);
  VarId add(VarId a, VarId b);
  VarId scale(VarId a, double factor);
  VarId sum(VarId a);
  // out[i*m+j] = rows[i] + cols[j]
  VarId outer_sum(VarId rows, VarId cols);

  // Escape hatch for ops defined outside this module (distillation losses).
  using BackwardFn = std::function<void(Tape&, VarId)>;
  VarId make_node(Array value, BackwardFn back);

  Array& grad_ref(VarId id) { return records_[id].grad; }

  void backward(VarId loss);
  void zero_grads();

 private:
  struct Record {
    Array value;
    Array grad;
    BackwardFn back;  // null for leaves
  };
  std::vector<Record> records_;
};

// Builds a scalar loss on a fresh tape from the registered parameter vars.
using TapeFn =
    std::function<Tape::VarId(Tape&, const std::vector<Tape::VarId>&)>;

// Central-difference check of every parameter entry; returns the max of
// |analytic - numeric| / max(1e-8, |analytic| + |numeric|). Runs the forward
// twice and throws if the two evaluations disagree (non-deterministic f).
double grad_check(const TapeFn& f, const std::vector<Array>& params,
                  double eps);

}  // namespace gkd
