#pragma once

#include <string>

#include "gkd/context.hpp"
#include "gkd/tape.hpp"

namespace gkd {

enum class DistillLoss { l2, kl };

std::string to_string(DistillLoss k);
DistillLoss distill_loss_from_string(const std::string& s);

struct DistillConfig {
  double temperature = 10.0;
  double lambda1 = 0.3;
  double lambda2 = 0.7;
  DistillLoss loss_kind = DistillLoss::kl;
  ContextKind teacher_context = ContextKind::global_ctx;
  ContextKind student_context = ContextKind::local;
  // Study flags reproducing the literal printed forms of the l2 loss:
  // sigmoid of +l/T instead of -l/T, and no square on the difference.
  bool literal_sigmoid_sign = false;
  bool literal_unsquared = false;
  // Classic T^2 gradient rescaling for softened losses, off unless requested.
  bool t_squared_rescale = false;

  void validate() const;
};

// elementwise 1/(1 + exp(-l/T)); plain-array form for teacher targets.
Array soften_sigmoid(const Array& logits, double temperature,
                     bool literal_sign = false);

// Temperature-softened losses. The teacher side is a constant: no gradient
// flows into it, so it is passed by value rather than as a tape var.
Tape::VarId l2_distill(Tape& tape, const Array& teacher_logits,
                       Tape::VarId student_logits, double temperature,
                       const DistillConfig* flags = nullptr);
Tape::VarId kl_distill(Tape& tape, const Array& teacher_logits,
                       Tape::VarId student_logits, double temperature,
                       const DistillConfig* flags = nullptr);

Tape::VarId distill_loss(Tape& tape, const DistillConfig& cfg,
                         const Array& teacher_logits,
                         Tape::VarId student_logits);

// L = lambda1 * hard + lambda2 * distill
Tape::VarId student_objective(Tape& tape, Tape::VarId hard_loss,
                              Tape::VarId distill_loss, double lambda1,
                              double lambda2);

// Forward-only values, for tests and reports.
double l2_distill_value(const Array& teacher_logits,
                        const Array& student_logits, double temperature);
double kl_distill_value(const Array& teacher_logits,
                        const Array& student_logits, double temperature);

}  // namespace gkd
