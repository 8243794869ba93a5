#pragma once

// Exhaustive split search written independently of the library kernels:
// every candidate edge is materialized as two explicit target lists and
// scored with its own entropy / MSE formulas.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include "slm/dft.hpp"

namespace slm::oracle {

// log2(n) - (1/n) sum c log2 c, the count form of Shannon entropy.
inline double entropy_of(const std::vector<double>& labels) {
  if (labels.empty()) return 0.0;
  std::map<double, double> counts;
  for (double y : labels) counts[y] += 1.0;
  const double n = static_cast<double>(labels.size());
  double acc = 0.0;
  for (const auto& [label, c] : counts) acc += c * std::log2(c);
  return std::max(0.0, std::log2(n) - acc / n);
}

inline double mse_of(const std::vector<double>& ys) {
  if (ys.empty()) return 0.0;
  long double mean = 0.0L;
  for (double y : ys) mean += y;
  mean /= static_cast<long double>(ys.size());
  long double sse = 0.0L;
  for (double y : ys) sse += (y - mean) * (y - mean);
  return static_cast<double>(sse / static_cast<long double>(ys.size()));
}

inline double weighted_loss(const std::vector<double>& left, const std::vector<double>& right,
                            Task task) {
  const double n = static_cast<double>(left.size() + right.size());
  auto impurity = task == Task::kClassification ? entropy_of : mse_of;
  return static_cast<double>(left.size()) / n * impurity(left) +
         static_cast<double>(right.size()) / n * impurity(right);
}

struct OracleSplit {
  bool degenerate = true;
  std::size_t edge = 0;
  double threshold = 0.0;
  double loss = 0.0;
};

inline OracleSplit exhaustive_split(std::span<const double> values, std::span<const double> targets,
                                    Task task, std::size_t bins, std::size_t min_leaf) {
  min_leaf = std::max<std::size_t>(min_leaf, 1);
  const double lo = *std::min_element(values.begin(), values.end());
  const double hi = *std::max_element(values.begin(), values.end());
  std::vector<double> losses(bins, std::numeric_limits<double>::infinity());
  if (hi > lo) {
    for (std::size_t k = 1; k < bins; ++k) {
      const double t = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(bins);
      std::vector<double> left, right;
      for (std::size_t i = 0; i < values.size(); ++i) (values[i] >= t ? right : left).push_back(targets[i]);
      if (left.size() < min_leaf || right.size() < min_leaf) continue;
      losses[k] = weighted_loss(left, right, task);
    }
  }
  OracleSplit out;
  const double best = *std::min_element(losses.begin(), losses.end());
  if (!std::isfinite(best)) return out;
  for (std::size_t k = 1; k < bins; ++k) {
    if (losses[k] <= best + 1e-12 * std::max(1.0, std::abs(best))) {
      out.degenerate = false;
      out.edge = k;
      out.threshold = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(bins);
      out.loss = losses[k];
      break;
    }
  }
  return out;
}

}  // namespace slm::oracle
