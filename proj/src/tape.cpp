#include "gkd/tape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gkd/kernels.hpp"

namespace gkd {

Tape::VarId Tape::input(Array value) {
  Array g = Array::zeros(value.shape);
  records_.push_back({std::move(value), std::move(g), nullptr});
  return records_.size() - 1;
}

Tape::VarId Tape::make_node(Array value, BackwardFn back) {
  Array g = Array::zeros(value.shape);
  records_.push_back({std::move(value), std::move(g), std::move(back)});
  return records_.size() - 1;
}

Tape::VarId Tape::linear(VarId x, VarId w, std::optional<VarId> b) {
  const Array& xv = value(x);
  const Array& wv = value(w);
  std::size_t n = xv.rows(), d_in = xv.cols();
  std::size_t d_out = wv.rows();
  if (wv.cols() != d_in) {
    throw ShapeError("linear: x " + shape_str(xv.shape) + " vs W " +
                     shape_str(wv.shape));
  }
  Array y = Array::zeros({n, d_out});
  // y = x · Wᵀ
  kernels::matmul(xv.data.data(), wv.data.data(), y.data.data(), n, d_in,
                  d_out, false, true, false);
  if (b) {
    const Array& bv = value(*b);
    if (bv.size() != d_out) {
      throw ShapeError("linear: bias " + shape_str(bv.shape) + " vs W " +
                       shape_str(wv.shape));
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d_out; ++j) y.data[i * d_out + j] += bv.data[j];
    }
  }
  return make_node(std::move(y), [x, w, b, n, d_in, d_out](Tape& t, VarId self) {
    const Array& gy = t.grad(self);
    const Array& xv = t.value(x);
    const Array& wv = t.value(w);
    // gx += gy · W ;  gW += gyᵀ · x
    kernels::matmul(gy.data.data(), wv.data.data(), t.grad_ref(x).data.data(),
                    n, d_out, d_in, false, false, true);
    kernels::matmul(gy.data.data(), xv.data.data(), t.grad_ref(w).data.data(),
                    d_out, n, d_in, true, false, true);
    if (b) {
      Array& gb = t.grad_ref(*b);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d_out; ++j) gb.data[j] += gy.data[i * d_out + j];
      }
    }
  });
}

Tape::VarId Tape::matmul(VarId a, VarId b) {
  const Array& av = value(a);
  const Array& bv = value(b);
  std::size_t n = av.rows(), k = av.cols(), m = bv.cols();
  if (bv.rows() != k) {
    throw ShapeError("matmul: " + shape_str(av.shape) + " vs " +
                     shape_str(bv.shape));
  }
  Array c = Array::zeros({n, m});
  kernels::matmul(av.data.data(), bv.data.data(), c.data.data(), n, k, m,
                  false, false, false);
  return make_node(std::move(c), [a, b, n, k, m](Tape& t, VarId self) {
    const Array& gc = t.grad(self);
    // gA += gC · Bᵀ ;  gB += Aᵀ · gC
    kernels::matmul(gc.data.data(), t.value(b).data.data(),
                    t.grad_ref(a).data.data(), n, m, k, false, true, true);
    kernels::matmul(t.value(a).data.data(), gc.data.data(),
                    t.grad_ref(b).data.data(), k, n, m, true, false, true);
  });
}

Tape::VarId Tape::matvec(VarId a, VarId v) {
  const Array& av = value(a);
  const Array& vv = value(v);
  std::size_t n = av.rows(), d = av.cols();
  if (vv.size() != d) {
    throw ShapeError("matvec: " + shape_str(av.shape) + " vs " +
                     shape_str(vv.shape));
  }
  Array y = Array::zeros({n});
  kernels::matmul(av.data.data(), vv.data.data(), y.data.data(), n, d, 1,
                  false, false, false);
  return make_node(std::move(y), [a, v, n, d](Tape& t, VarId self) {
    const Array& gy = t.grad(self);
    Array& ga = t.grad_ref(a);
    Array& gv = t.grad_ref(v);
    const Array& av = t.value(a);
    const Array& vv = t.value(v);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        ga.data[i * d + j] += gy.data[i] * vv.data[j];
        gv.data[j] += gy.data[i] * av.data[i * d + j];
      }
    }
  });
}

Tape::VarId Tape::leaky_relu(VarId x, double slope) {
  if (slope < 0.0 || slope >= 1.0) {
    throw std::invalid_argument("leaky_relu: slope must be in [0,1), got " +
                                std::to_string(slope));
  }
  const Array& xv = value(x);
  Array y = xv;
  for (double& v : y.data) v = v >= 0.0 ? v : slope * v;
  return make_node(std::move(y), [x, slope](Tape& t, VarId self) {
    const Array& gy = t.grad(self);
    const Array& xv = t.value(x);
    Array& gx = t.grad_ref(x);
    for (std::size_t i = 0; i < xv.size(); ++i) {
      // x == 0 takes the positive branch
      gx.data[i] += gy.data[i] * (xv.data[i] >= 0.0 ? 1.0 : slope);
    }
  });
}

Tape::VarId Tape::masked_softmax(VarId scores, const GraphMask& mask) {
  const Array& sv = value(scores);
  std::size_t n = sv.rows();
  if (sv.cols() != n || mask.n != n) {
    throw ShapeError("masked_softmax: scores " + shape_str(sv.shape) +
                     " vs mask of size " + std::to_string(mask.n));
  }
  Array p = Array::zeros({n, n});
  for (std::size_t i = 0; i < n; ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (mask.get(i, j)) {
        any = true;
        mx = std::max(mx, sv.data[i * n + j]);
      }
    }
    if (!any) {
      throw std::invalid_argument("masked_softmax: row " + std::to_string(i) +
                                  " has no unmasked entry");
    }
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (mask.get(i, j)) {
        double e = std::exp(sv.data[i * n + j] - mx);
        p.data[i * n + j] = e;
        z += e;
      }
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (mask.get(i, j)) p.data[i * n + j] /= z;
    }
  }
  GraphMask m = mask;
  return make_node(std::move(p), [scores, m, n](Tape& t, VarId self) {
    const Array& gp = t.grad(self);
    const Array& pv = t.value(self);
    Array& gs = t.grad_ref(scores);
    for (std::size_t i = 0; i < n; ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (m.get(i, j)) dot += gp.data[i * n + j] * pv.data[i * n + j];
      }
      for (std::size_t j = 0; j < n; ++j) {
        if (m.get(i, j)) {
          gs.data[i * n + j] += pv.data[i * n + j] * (gp.data[i * n + j] - dot);
        }
      }
    }
  });
}

Tape::VarId Tape::mask_fill(VarId scores, const GraphMask& mask, double fill) {
  const Array& sv = value(scores);
  std::size_t n = sv.rows();
  if (sv.cols() != n || mask.n != n) {
    throw ShapeError("mask_fill: scores " + shape_str(sv.shape) +
                     " vs mask of size " + std::to_string(mask.n));
  }
  Array y = sv;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!mask.get(i, j)) y.data[i * n + j] = fill;
    }
  }
  GraphMask m = mask;
  return make_node(std::move(y), [scores, m, n](Tape& t, VarId self) {
    const Array& gy = t.grad(self);
    Array& gs = t.grad_ref(scores);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (m.get(i, j)) gs.data[i * n + j] += gy.data[i * n + j];
      }
    }
  });
}

Tape::VarId Tape::concat(VarId u, VarId v) {
  const Array& uv = value(u);
  const Array& vv = value(v);
  if (uv.shape.size() != 1 || vv.shape.size() != 1 ||
      uv.size() != vv.size()) {
    throw ShapeError("concat: " + shape_str(uv.shape) + " vs " +
                     shape_str(vv.shape));
  }
  std::size_t d = uv.size();
  Array y = Array::zeros({2 * d});
  std::copy(uv.data.begin(), uv.data.end(), y.data.begin());
  std::copy(vv.data.begin(), vv.data.end(), y.data.begin() + d);
  return make_node(std::move(y), [u, v, d](Tape& t, VarId self) {
    const Array& gy = t.grad(self);
    Array& gu = t.grad_ref(u);
    Array& gv = t.grad_ref(v);
    for (std::size_t i = 0; i < d; ++i) {
      gu.data[i] += gy.data[i];
      gv.data[i] += gy.data[d + i];
    }
  });
}

Tape::VarId Tape::pool_mean(VarId x) {
  const Array& xv = value(x);
  std::size_t n = xv.rows(), d = xv.cols();
  if (n == 0) throw std::invalid_argument("pool_mean: empty input");
  Array y = Array::zeros({d});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) y.data[j] += xv.data[i * d + j];
  }
  for (double& v : y.data) v /= static_cast<double>(n);
  return make_node(std::move(y), [x, n, d](Tape& t, VarId self) {
    const Array& gy = t.grad(self);
    Array& gx = t.grad_ref(x);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        gx.data[i * d + j] += gy.data[j] / static_cast<double>(n);
      }
    }
  });
}

Tape::VarId Tape::pool_max(VarId x) {
  const Array& xv = value(x);
  std::size_t n = xv.rows(), d = xv.cols();
  if (n == 0) throw std::invalid_argument("pool_max: empty input");
  Array y = Array::zeros({d});
  std::vector<std::size_t> argmax(d, 0);
  for (std::size_t j = 0; j < d; ++j) {
    double best = xv.data[j];
    for (std::size_t i = 1; i < n; ++i) {
      // first attaining index wins
      if (xv.data[i * d + j] > best) {
        best = xv.data[i * d + j];
        argmax[j] = i;
      }
    }
    y.data[j] = best;
  }
  return make_node(std::move(y), [x, d, argmax](Tape& t, VarId self) {
    const Array& gy = t.grad(self);
    Array& gx = t.grad_ref(x);
    for (std::size_t j = 0; j < d; ++j) {
      gx.data[argmax[j] * d + j] += gy.data[j];
    }
  });
}

Tape::VarId Tape::cross_entropy(VarId logits, std::size_t label) {
  const Array& lv = value(logits);
  std::size_t k = lv.size();
  if (label >= k) {
    throw std::out_of_range("cross_entropy: label " + std::to_string(label) +
                            " out of range for " + std::to_string(k) +
                            " classes");
  }
  double mx = *std::max_element(lv.data.begin(), lv.data.end());
  double z = 0.0;
  for (double v : lv.data) z += std::exp(v - mx);
  double loss = -(lv.data[label] - mx - std::log(z));
  return make_node(Array::scalar(loss), [logits, label, k](Tape& t, VarId self) {
    double g = t.grad(self).data[0];
    const Array& lv = t.value(logits);
    Array& gl = t.grad_ref(logits);
    double mx = *std::max_element(lv.data.begin(), lv.data.end());
    double z = 0.0;
    for (double v : lv.data) z += std::exp(v - mx);
    for (std::size_t i = 0; i < k; ++i) {
      double p = std::exp(lv.data[i] - mx) / z;
      gl.data[i] += g * (p - (i == label ? 1.0 : 0.0));
    }
  });
}

Tape::VarId Tape::bce_with_logits(VarId logits,
                                  const std::vector<double>& targets) {
  const Array& lv = value(logits);
  std::size_t k = lv.size();
  if (targets.size() != k) {
    throw ShapeError("bce_with_logits: " + std::to_string(k) + " logits vs " +
                     std::to_string(targets.size()) + " targets");
  }
  for (double t : targets) {
    if (t != 0.0 && t != 1.0) {
      throw std::invalid_argument("bce_with_logits: non-binary target " +
                                  std::to_string(t));
    }
  }
  double loss = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double l = lv.data[i];
    // max(l,0) - l*t + log(1 + exp(-|l|))
    loss += std::max(l, 0.0) - l * targets[i] + std::log1p(std::exp(-std::abs(l)));
  }
  loss /= static_cast<double>(k);
  return make_node(Array::scalar(loss),
                   [logits, targets, k](Tape& t, VarId self) {
                     double g = t.grad(self).data[0];
                     const Array& lv = t.value(logits);
                     Array& gl = t.grad_ref(logits);
                     for (std::size_t i = 0; i < k; ++i) {
                       double s = 1.0 / (1.0 + std::exp(-lv.data[i]));
                       gl.data[i] += g * (s - targets[i]) / static_cast<double>(k);
                     }
                   });
}

Tape::VarId Tape::add(VarId a, VarId b) {
  const Array& av = value(a);
  const Array& bv = value(b);
  require_same_shape(av, bv, "add");
  Array y = av;
  for (std::size_t i = 0; i < y.size(); ++i) y.data[i] += bv.data[i];
  return make_node(std::move(y), [a, b](Tape& t, VarId self) {
    const Array& gy = t.grad(self);
    Array& ga = t.grad_ref(a);
    Array& gb = t.grad_ref(b);
    for (std::size_t i = 0; i < gy.size(); ++i) {
      ga.data[i] += gy.data[i];
      gb.data[i] += gy.data[i];
    }
  });
}

Tape::VarId Tape::scale(VarId a, double factor) {
  Array y = value(a);
  for (double& v : y.data) v *= factor;
  return make_node(std::move(y), [a, factor](Tape& t, VarId self) {
    const Array& gy = t.grad(self);
    Array& ga = t.grad_ref(a);
    for (std::size_t i = 0; i < gy.size(); ++i) ga.data[i] += factor * gy.data[i];
  });
}

Tape::VarId Tape::sum(VarId a) {
  const Array& av = value(a);
  double s = 0.0;
  for (double v : av.data) s += v;
  return make_node(Array::scalar(s), [a](Tape& t, VarId self) {
    double g = t.grad(self).data[0];
    Array& ga = t.grad_ref(a);
    for (double& v : ga.data) v += g;
  });
}

Tape::VarId Tape::outer_sum(VarId rows, VarId cols) {
  const Array& rv = value(rows);
  const Array& cv = value(cols);
  std::size_t n = rv.size(), m = cv.size();
  Array y = Array::zeros({n, m});
  kernels::outer_sum(rv.data.data(), cv.data.data(), y.data.data(), n, m);
  return make_node(std::move(y), [rows, cols, n, m](Tape& t, VarId self) {
    const Array& gy = t.grad(self);
    Array& gr = t.grad_ref(rows);
    Array& gc = t.grad_ref(cols);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        gr.data[i] += gy.data[i * m + j];
        gc.data[j] += gy.data[i * m + j];
      }
    }
  });
}

void Tape::backward(VarId loss) {
  if (!value(loss).is_scalar()) {
    throw std::invalid_argument("backward: loss must be scalar, got shape " +
                                shape_str(value(loss).shape));
  }
  zero_grads();
  records_[loss].grad.data[0] = 1.0;
  for (std::size_t i = loss + 1; i-- > 0;) {
    if (records_[i].back) records_[i].back(*this, i);
  }
}

void Tape::zero_grads() {
  for (Record& r : records_) {
    std::fill(r.grad.data.begin(), r.grad.data.end(), 0.0);
  }
}

double grad_check(const TapeFn& f, const std::vector<Array>& params,
                  double eps) {
  if (eps <= 0.0) throw std::invalid_argument("grad_check: eps must be > 0");

  auto eval = [&](const std::vector<Array>& p, std::vector<Array>* grads) {
    Tape tape;
    std::vector<Tape::VarId> ids;
    ids.reserve(p.size());
    for (const Array& a : p) ids.push_back(tape.input(a));
    Tape::VarId loss = f(tape, ids);
    double v = tape.value(loss).data[0];
    if (grads) {
      tape.backward(loss);
      grads->clear();
      for (Tape::VarId id : ids) grads->push_back(tape.grad(id));
    }
    return v;
  };

  std::vector<Array> analytic;
  double v1 = eval(params, &analytic);
  double v2 = eval(params, nullptr);
  if (v1 != v2) {
    throw std::runtime_error("grad_check: function is non-deterministic (" +
                             std::to_string(v1) + " vs " + std::to_string(v2) +
                             ")");
  }

  // The central difference carries rounding noise of about
  // ulp(f) / (2 eps); differences below that floor say nothing about the
  // analytic gradient (they show up when the true gradient is ~0, where the
  // relative-error denominator bottoms out at 1e-8).
  const double noise_floor =
      64.0 * 2.220446049250313e-16 * std::max(1.0, std::abs(v1)) / (2.0 * eps);

  double max_err = 0.0;
  std::vector<Array> work = params;
  for (std::size_t p = 0; p < work.size(); ++p) {
    for (std::size_t i = 0; i < work[p].size(); ++i) {
      double orig = work[p].data[i];
      work[p].data[i] = orig + eps;
      double fp = eval(work, nullptr);
      work[p].data[i] = orig - eps;
      double fm = eval(work, nullptr);
      work[p].data[i] = orig;
      double numeric = (fp - fm) / (2.0 * eps);
      double a = analytic[p].data[i];
      if (std::abs(a - numeric) <= noise_floor) continue;
      double err = std::abs(a - numeric) /
                   std::max(1e-8, std::abs(a) + std::abs(numeric));
      max_err = std::max(max_err, err);
    }
  }
  return max_err;
}

}  // namespace gkd
