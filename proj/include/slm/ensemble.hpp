#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "slm/dataset.hpp"
#include "slm/parallel.hpp"
#include "slm/tree.hpp"

namespace slm {

struct ForestConfig {
  std::size_t n_trees = 30;
  bool bootstrap = true;
};

struct ForestModel {
  Task task = Task::kClassification;
  std::size_t n_features = 0;
  std::size_t n_classes = 0;
  std::uint64_t seed = 0;
  bool bootstrap = true;
  std::vector<SlmTree> trees;

  // Majority vote (ties to the smallest class id) or mean of tree outputs.
  double predict(std::span<const double> x) const;
};

struct BoostConfig {
  std::size_t n_trees = 30;
  double learning_rate = 0.1;
  std::size_t max_depth = 4;  // overrides the tree config's depth
};

// Additive model F(x) = base + lr * sum of stage trees. Regression keeps one
// score; binary classification one logit; C > 2 classes one score per class
// with a softmax readout.
struct BoostModel {
  Task task = Task::kRegression;
  std::size_t n_features = 0;
  std::size_t n_classes = 0;
  double learning_rate = 0.1;
  std::vector<double> base_score;
  std::vector<std::vector<SlmTree>> stages;  // stages[s][k]: tree for score k
  std::vector<double> train_loss;            // before stage 1, then after each stage

  std::vector<double> raw_scores(std::span<const double> x) const;
  std::vector<double> predict_proba(std::span<const double> x) const;
  double predict(std::span<const double> x) const;
};

// Tree t is trained on a bootstrap sample drawn from derive_seed(seed, t),
// with its search seeded from the same stream, so trees are independent of
// the training order and may be built concurrently.
ForestModel fit_forest(const Dataset& ds, const TreeConfig& tree_cfg, const ForestConfig& cfg,
                       WorkerPool& pool = default_pool());

// Plain gradient boosting of regression trees on pseudo-residuals (squared
// error for regression, log-loss for classification).
BoostModel fit_boost(const Dataset& ds, const TreeConfig& tree_cfg, const BoostConfig& cfg,
                     WorkerPool& pool = default_pool());

}  // namespace slm
