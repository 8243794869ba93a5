#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "slm/dataset.hpp"
#include "slm/parallel.hpp"
#include "slm/types.hpp"

namespace slm {

// Projected values f(a) = a^T x of a node's samples with their targets.
// `targets` is a view; its owner must outlive the projection.
struct Projected1D {
  std::vector<double> values;
  std::span<const double> targets;
  Task task = Task::kClassification;
  std::size_t n_classes = 0;  // classification only
};

// Samples with value >= threshold go right.
struct SplitRecord {
  double threshold = 0.0;
  double loss = 0.0;
  std::size_t left_count = 0;
  std::size_t right_count = 0;
  bool degenerate = true;
};

struct DftRanking {
  std::vector<double> losses;      // per raw dimension
  std::vector<std::size_t> order;  // dimensions, most discriminant first
};

// Weighted split impurity: entropy in bits (classification) or MSE around
// each side's mean (regression), each side weighted by its share of samples.
// Classification targets hold integral labels; n_classes = 0 infers it.
double dft_loss(std::span<const double> left, std::span<const double> right, Task task,
                std::size_t n_classes = 0);

// Loss of leaving the samples unsplit.
double node_impurity(std::span<const double> targets, Task task, std::size_t n_classes = 0);

// Interior edge k (1 <= k < bins) of the uniform partition of [lo, hi].
inline double candidate_threshold(double lo, double hi, std::size_t k, std::size_t bins) {
  return lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(bins);
}

// Losses closer than this to the minimum are treated as equal.
inline double loss_tie_tolerance(double min_loss) {
  return 1e-12 * std::max(1.0, std::abs(min_loss));
}

// Minimum-loss threshold among the bins-1 interior edges that leave at least
// min_leaf samples on each side. Ties (see loss_tie_tolerance) go to the
// smallest threshold. When no
// edge qualifies the record is degenerate and carries the unsplit loss.
SplitRecord best_split(const Projected1D& p, std::size_t bins, std::size_t min_leaf);

std::vector<double> gather_targets(const Dataset& ds, std::span<const std::size_t> rows);

// out[i] = sum_j coeffs[j] * x[rows[i]][dims[j]], accumulated in dims order.
void project_rows(const Dataset& ds, std::span<const std::size_t> rows,
                  std::span<const std::size_t> dims, std::span<const double> coeffs,
                  std::vector<double>& out);

double project_point(std::span<const double> x, std::span<const std::size_t> dims,
                     std::span<const double> coeffs);

DftRanking rank_dimensions(const Dataset& ds, std::span<const std::size_t> rows,
                           std::size_t bins, std::size_t min_leaf);

// best_split over every projection; element i of the result belongs to
// element i of the input regardless of the pool size.
std::vector<SplitRecord> evaluate_candidates(std::span<const Projected1D> projections,
                                             std::size_t bins, std::size_t min_leaf,
                                             WorkerPool& pool = default_pool());

// Same contract as evaluate_candidates, but projection i is materialized on
// the worker by fill(i, values) into a reused buffer.
using ProjectionFill = std::function<void(std::size_t, std::vector<double>&)>;
std::vector<SplitRecord> evaluate_generated(std::size_t count, const ProjectionFill& fill,
                                            std::span<const double> targets, Task task,
                                            std::size_t n_classes, std::size_t bins,
                                            std::size_t min_leaf,
                                            WorkerPool& pool = default_pool());

}  // namespace slm
