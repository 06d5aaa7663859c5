#include "gkd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace gkd {

double average_precision(const std::vector<double>& scores,
                         const std::vector<bool>& positives) {
  if (scores.size() != positives.size()) {
    throw std::invalid_argument("average_precision: length mismatch");
  }
  std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  std::size_t hits = 0;
  double sum = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    if (positives[order[r]]) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(r + 1);
    }
  }
  if (hits == 0) {
    throw std::invalid_argument("average_precision: no positive instance");
  }
  return sum / static_cast<double>(hits);
}

MapResult mean_average_precision(const Array& scores, const Array& labels,
                                 bool score_zero_empty) {
  require_same_shape(scores, labels, "mean_average_precision");
  std::size_t n = scores.rows(), k = scores.cols();
  if (n == 0) throw std::invalid_argument("mean_average_precision: no samples");
  MapResult out;
  out.per_class_ap.assign(k, std::nan(""));
  double total = 0.0;
  std::size_t counted = 0;
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<double> s(n);
    std::vector<bool> pos(n);
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = scores.at(i, c);
      pos[i] = labels.at(i, c) != 0.0;
      any = any || pos[i];
    }
    if (!any) {
      if (score_zero_empty) {
        out.per_class_ap[c] = 0.0;
        ++counted;
      }
      continue;
    }
    out.per_class_ap[c] = average_precision(s, pos);
    total += out.per_class_ap[c];
    ++counted;
  }
  if (counted == 0) {
    throw std::invalid_argument("mean_average_precision: no class has a positive");
  }
  out.map = total / static_cast<double>(counted);
  return out;
}

std::size_t argmax_index(const double* row, std::size_t k) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < k; ++i) {
    if (row[i] > row[best]) best = i;
  }
  return best;
}

double accuracy(const Array& pred_logits, const std::vector<int>& labels) {
  std::size_t n = pred_logits.rows(), k = pred_logits.cols();
  if (labels.size() != n) {
    throw std::invalid_argument("accuracy: sample count mismatch");
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= k) {
      throw std::out_of_range("accuracy: label " + std::to_string(labels[i]) +
                              " out of range");
    }
    if (argmax_index(&pred_logits.data[i * k], k) ==
        static_cast<std::size_t>(labels[i])) {
      ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(n);
}

std::vector<std::vector<long>> confusion_matrix(const Array& pred_logits,
                                                const std::vector<int>& labels,
                                                std::size_t k) {
  std::size_t n = pred_logits.rows();
  if (pred_logits.cols() != k) {
    throw ShapeError("confusion_matrix: logits " + shape_str(pred_logits.shape) +
                     " vs k=" + std::to_string(k));
  }
  if (labels.size() != n) {
    throw std::invalid_argument("confusion_matrix: sample count mismatch");
  }
  std::vector<std::vector<long>> m(k, std::vector<long>(k, 0));
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= k) {
      throw std::out_of_range("confusion_matrix: label out of range");
    }
    std::size_t pred = argmax_index(&pred_logits.data[i * k], k);
    m[static_cast<std::size_t>(labels[i])][pred] += 1;
  }
  return m;
}

std::string EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["mode"] = mode;
  j["n_samples"] = n_samples;
  if (accuracy) j["accuracy"] = *accuracy;
  if (map) j["map"] = *map;
  if (per_class_ap) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (double v : *per_class_ap) {
      if (std::isnan(v)) {
        arr.push_back(nullptr);
      } else {
        arr.push_back(v);
      }
    }
    j["per_class_ap"] = arr;
  }
  if (confusion) j["confusion"] = *confusion;
  return j.dump(2);
}

std::string EvalReport::confusion_csv() const {
  if (!confusion) return "";
  std::string out;
  for (const auto& row : *confusion) {
    long total = 0;
    for (long v : row) total += v;
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ",";
      double norm = total > 0 ? static_cast<double>(row[j]) / total : 0.0;
      out += std::to_string(norm);
    }
    out += "\n";
  }
  return out;
}

}  // namespace gkd
