#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gkd/array.hpp"

namespace gkd {

struct EvalReport {
  std::string mode;  // "single_label" | "multi_label"
  std::optional<double> map;
  std::optional<std::vector<double>> per_class_ap;
  std::optional<double> accuracy;
  std::optional<std::vector<std::vector<long>>> confusion;
  std::size_t n_samples = 0;

  std::string to_json() const;
  std::string confusion_csv() const;
};

// AP without interpolation: sort by descending score (ties by ascending
// original index), average precision-at-rank over the positives.
// Throws if there is no positive; mean_average_precision consumes that as
// the class-skip signal.
double average_precision(const std::vector<double>& scores,
                         const std::vector<bool>& positives);

struct MapResult {
  double map = 0.0;
  std::vector<double> per_class_ap;  // NaN for skipped classes
};

// score_zero_empty scores no-positive classes as 0 instead of skipping them.
MapResult mean_average_precision(const Array& scores, const Array& labels,
                                 bool score_zero_empty = false);

// argmax ties broken by lowest class index
std::size_t argmax_index(const double* row, std::size_t k);

double accuracy(const Array& pred_logits, const std::vector<int>& labels);

std::vector<std::vector<long>> confusion_matrix(const Array& pred_logits,
                                                const std::vector<int>& labels,
                                                std::size_t k);

}  // namespace gkd
