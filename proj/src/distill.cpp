#include "gkd/distill.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gkd {

std::string to_string(DistillLoss k) {
  return k == DistillLoss::l2 ? "l2" : "kl";
}

DistillLoss distill_loss_from_string(const std::string& s) {
  if (s == "l2") return DistillLoss::l2;
  if (s == "kl") return DistillLoss::kl;
  throw std::invalid_argument("unknown distillation loss '" + s + "'");
}

void DistillConfig::validate() const {
  if (temperature <= 0.0) {
    throw std::invalid_argument("DistillConfig: temperature must be > 0");
  }
  if (lambda1 < 0.0 || lambda2 < 0.0) {
    throw std::invalid_argument("DistillConfig: lambdas must be >= 0");
  }
  if (lambda1 == 0.0 && lambda2 == 0.0) {
    throw std::invalid_argument("DistillConfig: lambda1 and lambda2 both zero");
  }
  if (teacher_context == student_context) {
    throw std::invalid_argument(
        "DistillConfig: teacher and student must use different contexts");
  }
}

namespace {
double sig(double l, double temperature, bool literal_sign) {
  double z = l / temperature;
  if (literal_sign) z = -z;
  return 1.0 / (1.0 + std::exp(-z));
}

std::vector<double> softmax_t(const Array& logits, double temperature) {
  std::vector<double> p(logits.size());
  double mx = *std::max_element(logits.data.begin(), logits.data.end());
  double z = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp((logits.data[i] - mx) / temperature);
    z += p[i];
  }
  for (double& v : p) v /= z;
  return p;
}
}  // namespace

Array soften_sigmoid(const Array& logits, double temperature,
                     bool literal_sign) {
  if (temperature <= 0.0) {
    throw std::invalid_argument("soften_sigmoid: temperature must be > 0");
  }
  Array out = logits;
  for (double& v : out.data) v = sig(v, temperature, literal_sign);
  return out;
}

Tape::VarId l2_distill(Tape& tape, const Array& teacher_logits,
                       Tape::VarId student_logits, double temperature,
                       const DistillConfig* flags) {
  if (temperature <= 0.0) {
    throw std::invalid_argument("l2_distill: temperature must be > 0");
  }
  const Array& sv = tape.value(student_logits);
  if (sv.size() != teacher_logits.size()) {
    throw ShapeError("l2_distill: teacher " + shape_str(teacher_logits.shape) +
                     " vs student " + shape_str(sv.shape));
  }
  bool lit_sign = flags && flags->literal_sigmoid_sign;
  bool lit_unsq = flags && flags->literal_unsquared;
  double rescale =
      (flags && flags->t_squared_rescale) ? temperature * temperature : 1.0;
  std::size_t k = sv.size();
  double loss = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double pt = sig(teacher_logits.data[i], temperature, lit_sign);
    double ps = sig(sv.data[i], temperature, lit_sign);
    loss += lit_unsq ? (pt - ps) : (pt - ps) * (pt - ps);
  }
  loss = rescale * loss / static_cast<double>(k);
  Array teacher = teacher_logits;
  return tape.make_node(
      Array::scalar(loss),
      [student_logits, teacher, temperature, lit_sign, lit_unsq, rescale,
       k](Tape& t, Tape::VarId self) {
        double g = t.grad(self).data[0] * rescale / static_cast<double>(k);
        const Array& sv = t.value(student_logits);
        Array& gs = t.grad_ref(student_logits);
        for (std::size_t i = 0; i < k; ++i) {
          double pt = sig(teacher.data[i], temperature, lit_sign);
          double ps = sig(sv.data[i], temperature, lit_sign);
          double dps = ps * (1.0 - ps) / temperature;  // d ps / d logit
          if (lit_sign) dps = -dps;
          double dloss = lit_unsq ? -dps : 2.0 * (ps - pt) * dps;
          gs.data[i] += g * dloss;
        }
      });
}

Tape::VarId kl_distill(Tape& tape, const Array& teacher_logits,
                       Tape::VarId student_logits, double temperature,
                       const DistillConfig* flags) {
  if (temperature <= 0.0) {
    throw std::invalid_argument("kl_distill: temperature must be > 0");
  }
  const Array& sv = tape.value(student_logits);
  if (sv.size() != teacher_logits.size()) {
    throw ShapeError("kl_distill: teacher " + shape_str(teacher_logits.shape) +
                     " vs student " + shape_str(sv.shape));
  }
  if (sv.size() < 2) {
    throw std::invalid_argument("kl_distill: needs at least 2 classes");
  }
  double rescale =
      (flags && flags->t_squared_rescale) ? temperature * temperature : 1.0;
  std::vector<double> p = softmax_t(teacher_logits, temperature);
  std::vector<double> q = softmax_t(sv, temperature);
  double loss = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) loss += p[i] * (std::log(p[i]) - std::log(q[i]));
  }
  loss = std::max(loss, 0.0) * rescale;  // clamp away -0 from rounding
  std::size_t k = p.size();
  return tape.make_node(
      Array::scalar(loss),
      [student_logits, p, temperature, rescale, k](Tape& t, Tape::VarId self) {
        double g = t.grad(self).data[0] * rescale;
        std::vector<double> q = softmax_t(t.value(student_logits), temperature);
        Array& gs = t.grad_ref(student_logits);
        for (std::size_t i = 0; i < k; ++i) {
          gs.data[i] += g * (q[i] - p[i]) / temperature;
        }
      });
}

Tape::VarId distill_loss(Tape& tape, const DistillConfig& cfg,
                         const Array& teacher_logits,
                         Tape::VarId student_logits) {
  cfg.validate();
  return cfg.loss_kind == DistillLoss::l2
             ? l2_distill(tape, teacher_logits, student_logits,
                          cfg.temperature, &cfg)
             : kl_distill(tape, teacher_logits, student_logits,
                          cfg.temperature, &cfg);
}

Tape::VarId student_objective(Tape& tape, Tape::VarId hard_loss,
                              Tape::VarId distill_loss, double lambda1,
                              double lambda2) {
  if (lambda1 < 0.0 || lambda2 < 0.0) {
    throw std::invalid_argument("student_objective: lambdas must be >= 0");
  }
  return tape.add(tape.scale(hard_loss, lambda1),
                  tape.scale(distill_loss, lambda2));
}

double l2_distill_value(const Array& teacher_logits,
                        const Array& student_logits, double temperature) {
  Tape t;
  Tape::VarId s = t.input(student_logits);
  return t.value(l2_distill(t, teacher_logits, s, temperature)).data[0];
}

double kl_distill_value(const Array& teacher_logits,
                        const Array& student_logits, double temperature) {
  Tape t;
  Tape::VarId s = t.input(student_logits);
  return t.value(kl_distill(t, teacher_logits, s, temperature)).data[0];
}

}  // namespace gkd
