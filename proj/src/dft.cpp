#include "slm/dft.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace slm {

namespace {

double entropy_bits(const double* counts, std::size_t n_classes, double total) {
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (counts[c] <= 0.0) continue;
    double p = counts[c] / total;
    h -= p * std::log2(p);
  }
  return h;
}

// Shared by dft_loss and best_split so that equal partitions give bit-equal losses.
double split_entropy(const double* left, const double* right, std::size_t n_classes, double n_left,
                     double n_right) {
  const double n = n_left + n_right;
  return (n_left / n) * entropy_bits(left, n_classes, n_left) +
         (n_right / n) * entropy_bits(right, n_classes, n_right);
}

std::size_t infer_classes(std::span<const double> a, std::span<const double> b) {
  double max_label = 0.0;
  for (double t : a) max_label = std::max(max_label, t);
  for (double t : b) max_label = std::max(max_label, t);
  return static_cast<std::size_t>(max_label) + 1;
}

void count_labels(std::span<const double> targets, std::vector<double>& counts) {
  for (double t : targets) {
    auto c = static_cast<std::size_t>(t);
    if (t < 0 || c >= counts.size()) throw Error("class label outside [0, n_classes)");
    counts[c] += 1.0;
  }
}

double mean_squared_error(std::span<const double> ys) {
  if (ys.empty()) return 0.0;
  double mean = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
  double sse = 0.0;
  for (double y : ys) sse += (y - mean) * (y - mean);
  return sse / static_cast<double>(ys.size());
}

// Bin b holds values in [edge(b), edge(b+1)), with edge(0) = -inf and
// edge(bins) = +inf, consistent with the `value >= edge(k)` routing rule.
std::size_t bin_of(double v, double lo, double hi, std::size_t bins) {
  double scaled = (v - lo) / (hi - lo) * static_cast<double>(bins);
  auto b = scaled <= 0.0 ? std::size_t{0}
                         : std::min(static_cast<std::size_t>(scaled), bins - 1);
  while (b + 1 < bins && v >= candidate_threshold(lo, hi, b + 1, bins)) ++b;
  while (b > 0 && v < candidate_threshold(lo, hi, b, bins)) --b;
  return b;
}

SplitRecord degenerate_record(const Projected1D& p, double lo) {
  SplitRecord r;
  r.threshold = lo;
  r.loss = node_impurity(p.targets, p.task, p.n_classes);
  r.left_count = 0;
  r.right_count = p.values.size();
  r.degenerate = true;
  return r;
}

}  // namespace

double dft_loss(std::span<const double> left, std::span<const double> right, Task task,
                std::size_t n_classes) {
  if (left.empty() && right.empty()) throw Error("dft_loss: both sides are empty");
  const double n_left = static_cast<double>(left.size());
  const double n_right = static_cast<double>(right.size());
  if (task == Task::kClassification) {
    if (n_classes == 0) n_classes = infer_classes(left, right);
    std::vector<double> lc(n_classes, 0.0), rc(n_classes, 0.0);
    count_labels(left, lc);
    count_labels(right, rc);
    return split_entropy(lc.data(), rc.data(), n_classes, n_left, n_right);
  }
  const double n = n_left + n_right;
  return (n_left / n) * mean_squared_error(left) + (n_right / n) * mean_squared_error(right);
}

double node_impurity(std::span<const double> targets, Task task, std::size_t n_classes) {
  if (targets.empty()) return 0.0;
  if (task == Task::kRegression) return mean_squared_error(targets);
  if (n_classes == 0) n_classes = infer_classes(targets, {});
  std::vector<double> counts(n_classes, 0.0);
  count_labels(targets, counts);
  return entropy_bits(counts.data(), n_classes, static_cast<double>(targets.size()));
}

SplitRecord best_split(const Projected1D& p, std::size_t bins, std::size_t min_leaf) {
  const std::size_t n = p.values.size();
  if (n == 0) throw Error("best_split: empty input");
  if (p.targets.size() != n) throw Error("best_split: values and targets differ in length");
  if (bins < 2) throw Error("best_split: bins must be at least 2");
  min_leaf = std::max<std::size_t>(min_leaf, 1);

  auto [lo_it, hi_it] = std::minmax_element(p.values.begin(), p.values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw Error("best_split: non-finite projected value");
  if (n < 2 * min_leaf || !(hi > lo)) return degenerate_record(p, lo);

  // losses[k] for edge k; infinity marks edges that violate min_leaf.
  std::vector<double> losses(bins, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> left_counts(bins, 0);
  const double total = static_cast<double>(n);

  if (p.task == Task::kClassification) {
    const std::size_t classes = p.n_classes == 0 ? infer_classes(p.targets, {}) : p.n_classes;
    std::vector<double> hist(bins * classes, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      auto c = static_cast<std::size_t>(p.targets[i]);
      if (c >= classes) throw Error("class label outside [0, n_classes)");
      hist[bin_of(p.values[i], lo, hi, bins) * classes + c] += 1.0;
    }
    std::vector<double> left(classes, 0.0), right(classes, 0.0);
    for (std::size_t b = 0; b < bins; ++b)
      for (std::size_t c = 0; c < classes; ++c) right[c] += hist[b * classes + c];
    double n_left = 0.0;
    for (std::size_t k = 1; k < bins; ++k) {
      for (std::size_t c = 0; c < classes; ++c) {
        double moved = hist[(k - 1) * classes + c];
        left[c] += moved;
        right[c] -= moved;
        n_left += moved;
      }
      const double n_right = total - n_left;
      if (n_left < static_cast<double>(min_leaf) || n_right < static_cast<double>(min_leaf)) continue;
      losses[k] = split_entropy(left.data(), right.data(), classes, n_left, n_right);
      left_counts[k] = static_cast<std::size_t>(n_left);
    }
  } else {
    const double center = std::accumulate(p.targets.begin(), p.targets.end(), 0.0) / total;
    std::vector<double> count(bins, 0.0), sum(bins, 0.0), sumsq(bins, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t b = bin_of(p.values[i], lo, hi, bins);
      double y = p.targets[i] - center;
      count[b] += 1.0;
      sum[b] += y;
      sumsq[b] += y * y;
    }
    double all_sum = 0.0, all_sq = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
      all_sum += sum[b];
      all_sq += sumsq[b];
    }
    double n_left = 0.0, s_left = 0.0, q_left = 0.0;
    for (std::size_t k = 1; k < bins; ++k) {
      n_left += count[k - 1];
      s_left += sum[k - 1];
      q_left += sumsq[k - 1];
      const double n_right = total - n_left;
      if (n_left < static_cast<double>(min_leaf) || n_right < static_cast<double>(min_leaf)) continue;
      const double s_right = all_sum - s_left;
      const double q_right = all_sq - q_left;
      double sse_left = std::max(0.0, q_left - s_left * s_left / n_left);
      double sse_right = std::max(0.0, q_right - s_right * s_right / n_right);
      losses[k] = (sse_left + sse_right) / total;
      left_counts[k] = static_cast<std::size_t>(n_left);
    }
  }

  // Candidates whose loss is within rounding of the minimum count as ties and
  // go to the smallest edge.
  double min_loss = std::numeric_limits<double>::infinity();
  for (double l : losses) min_loss = std::min(min_loss, l);
  if (!std::isfinite(min_loss)) return degenerate_record(p, lo);
  const double cutoff = min_loss + loss_tie_tolerance(min_loss);
  SplitRecord best;
  for (std::size_t k = 1; k < bins; ++k) {
    if (!(losses[k] <= cutoff)) continue;
    best.loss = losses[k];
    best.threshold = candidate_threshold(lo, hi, k, bins);
    best.left_count = left_counts[k];
    best.right_count = n - left_counts[k];
    best.degenerate = false;
    break;
  }
  return best;
}

std::vector<double> gather_targets(const Dataset& ds, std::span<const std::size_t> rows) {
  std::vector<double> out;
  out.reserve(rows.size());
  auto targets = ds.targets();
  for (std::size_t r : rows) out.push_back(targets[r]);
  return out;
}

double project_point(std::span<const double> x, std::span<const std::size_t> dims,
                     std::span<const double> coeffs) {
  double v = 0.0;
  for (std::size_t j = 0; j < dims.size(); ++j) v += coeffs[j] * x[dims[j]];
  return v;
}

void project_rows(const Dataset& ds, std::span<const std::size_t> rows,
                  std::span<const std::size_t> dims, std::span<const double> coeffs,
                  std::vector<double>& out) {
  out.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = project_point(ds.row(rows[i]), dims, coeffs);
}

DftRanking rank_dimensions(const Dataset& ds, std::span<const std::size_t> rows, std::size_t bins,
                           std::size_t min_leaf) {
  if (rows.empty()) throw Error("rank_dimensions: empty row set");
  auto targets = gather_targets(ds, rows);
  DftRanking ranking;
  ranking.losses.resize(ds.cols());
  Projected1D p{{}, targets, ds.task(), ds.n_classes()};
  p.values.resize(rows.size());
  for (std::size_t d = 0; d < ds.cols(); ++d) {
    for (std::size_t i = 0; i < rows.size(); ++i) p.values[i] = ds.at(rows[i], d);
    ranking.losses[d] = best_split(p, bins, min_leaf).loss;
  }
  ranking.order.resize(ds.cols());
  std::iota(ranking.order.begin(), ranking.order.end(), std::size_t{0});
  std::stable_sort(ranking.order.begin(), ranking.order.end(),
                   [&](std::size_t a, std::size_t b) { return ranking.losses[a] < ranking.losses[b]; });
  return ranking;
}

std::vector<SplitRecord> evaluate_candidates(std::span<const Projected1D> projections,
                                             std::size_t bins, std::size_t min_leaf,
                                             WorkerPool& pool) {
  if (projections.empty()) throw Error("evaluate_candidates: empty candidate list");
  std::vector<SplitRecord> out(projections.size());
  pool.parallel_for(projections.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = best_split(projections[i], bins, min_leaf);
  });
  return out;
}

std::vector<SplitRecord> evaluate_generated(std::size_t count, const ProjectionFill& fill,
                                            std::span<const double> targets, Task task,
                                            std::size_t n_classes, std::size_t bins,
                                            std::size_t min_leaf, WorkerPool& pool) {
  if (count == 0) throw Error("evaluate_generated: empty candidate list");
  std::vector<SplitRecord> out(count);
  pool.parallel_for(count, [&](std::size_t begin, std::size_t end) {
    Projected1D p{{}, targets, task, n_classes};
    for (std::size_t i = begin; i < end; ++i) {
      fill(i, p.values);
      out[i] = best_split(p, bins, min_leaf);
    }
  });
  return out;
}

}  // namespace slm
