#include "slm/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace slm {

namespace {

constexpr std::uint64_t kBootstrapStream = 0xB0075742;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::vector<double> softmax(std::span<const double> scores) {
  const double top = *std::max_element(scores.begin(), scores.end());
  std::vector<double> out(scores.size());
  double total = 0.0;
  for (std::size_t k = 0; k < scores.size(); ++k) total += out[k] = std::exp(scores[k] - top);
  for (double& p : out) p /= total;
  return out;
}

// Probabilities from raw scores; a single score is a binary logit.
std::vector<double> scores_to_proba(std::span<const double> scores) {
  if (scores.size() == 1) {
    const double p1 = sigmoid(scores[0]);
    return {1.0 - p1, p1};
  }
  return softmax(scores);
}

double mean_log_loss(const std::vector<std::vector<double>>& scores, const Dataset& ds) {
  double total = 0.0;
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    auto proba = scores_to_proba(scores[i]);
    total -= std::log(std::max(proba[static_cast<std::size_t>(ds.label(i))], 1e-15));
  }
  return total / static_cast<double>(ds.rows());
}

}  // namespace

double ForestModel::predict(std::span<const double> x) const {
  if (trees.empty()) throw Error("forest has no trees");
  if (task == Task::kRegression) {
    double sum = 0.0;
    for (const auto& t : trees) sum += t.predict(x);
    return sum / static_cast<double>(trees.size());
  }
  std::vector<double> votes(n_classes, 0.0);
  for (const auto& t : trees) votes[static_cast<std::size_t>(t.predict(x))] += 1.0;
  return static_cast<double>(argmax_class(votes));
}

ForestModel fit_forest(const Dataset& ds, const TreeConfig& tree_cfg, const ForestConfig& cfg,
                       WorkerPool& pool) {
  if (cfg.n_trees == 0) throw Error("a forest needs at least one tree");
  tree_cfg.validate();
  ForestModel model;
  model.task = ds.task();
  model.n_features = ds.cols();
  model.n_classes = ds.n_classes();
  model.seed = tree_cfg.seed;
  model.bootstrap = cfg.bootstrap;
  model.trees.resize(cfg.n_trees);

  pool.parallel_for(cfg.n_trees, [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      TreeConfig c = tree_cfg;
      c.seed = derive_seed(tree_cfg.seed, t);
      std::vector<std::size_t> rows(ds.rows());
      if (cfg.bootstrap) {
        Rng rng(derive_seed(c.seed, kBootstrapStream));
        std::uniform_int_distribution<std::size_t> pick(0, ds.rows() - 1);
        for (auto& r : rows) r = pick(rng);
      } else {
        std::iota(rows.begin(), rows.end(), std::size_t{0});
      }
      model.trees[t] = build_tree(ds, rows, c, pool);
    }
  });
  return model;
}

std::vector<double> BoostModel::raw_scores(std::span<const double> x) const {
  if (x.size() != n_features)
    throw Error("expected " + std::to_string(n_features) + " features, got " + std::to_string(x.size()));
  std::vector<double> scores = base_score;
  for (const auto& stage : stages)
    for (std::size_t k = 0; k < stage.size(); ++k) scores[k] += learning_rate * stage[k].predict(x);
  return scores;
}

std::vector<double> BoostModel::predict_proba(std::span<const double> x) const {
  if (task != Task::kClassification) throw Error("predict_proba requires a classification model");
  return scores_to_proba(raw_scores(x));
}

double BoostModel::predict(std::span<const double> x) const {
  if (task == Task::kRegression) return raw_scores(x)[0];
  return static_cast<double>(argmax_class(predict_proba(x)));
}

BoostModel fit_boost(const Dataset& ds, const TreeConfig& tree_cfg, const BoostConfig& cfg,
                     WorkerPool& pool) {
  if (cfg.n_trees == 0) throw Error("boosting needs at least one stage");
  if (!(cfg.learning_rate > 0.0 && cfg.learning_rate <= 1.0))
    throw Error("learning_rate must lie in (0, 1]");
  const std::size_t n = ds.rows();

  BoostModel model;
  model.task = ds.task();
  model.n_features = ds.cols();
  model.n_classes = ds.n_classes();
  model.learning_rate = cfg.learning_rate;

  if (ds.task() == Task::kRegression) {
    auto y = ds.targets();
    model.base_score = {std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n)};
  } else {
    std::vector<double> prior(ds.n_classes(), 0.0);
    for (std::size_t i = 0; i < n; ++i) prior[static_cast<std::size_t>(ds.label(i))] += 1.0;
    for (double& p : prior) p = std::clamp(p / static_cast<double>(n), 1e-6, 1.0 - 1e-6);
    if (ds.n_classes() == 2)
      model.base_score = {std::log(prior[1] / prior[0])};
    else
      for (double p : prior) model.base_score.push_back(std::log(p));
  }
  const std::size_t k_scores = model.base_score.size();
  std::vector<std::vector<double>> scores(n, model.base_score);

  auto training_loss = [&] {
    if (ds.task() == Task::kClassification) return mean_log_loss(scores, ds);
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) sse += (ds.targets()[i] - scores[i][0]) * (ds.targets()[i] - scores[i][0]);
    return sse / static_cast<double>(n);
  };
  model.train_loss.push_back(training_loss());

  TreeConfig stage_cfg = tree_cfg;
  stage_cfg.max_depth = cfg.max_depth;
  for (std::size_t s = 0; s < cfg.n_trees; ++s) {
    // Pseudo-residuals for every score, computed from the scores before this stage.
    std::vector<std::vector<double>> residuals(k_scores, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
      if (ds.task() == Task::kRegression) {
        residuals[0][i] = ds.targets()[i] - scores[i][0];
        continue;
      }
      auto proba = scores_to_proba(scores[i]);
      const auto label = static_cast<std::size_t>(ds.label(i));
      if (k_scores == 1) {
        residuals[0][i] = (label == 1 ? 1.0 : 0.0) - proba[1];
      } else {
        for (std::size_t k = 0; k < k_scores; ++k) residuals[k][i] = (label == k ? 1.0 : 0.0) - proba[k];
      }
    }

    std::vector<SlmTree> stage;
    for (std::size_t k = 0; k < k_scores; ++k) {
      stage_cfg.seed = derive_seed(tree_cfg.seed, s * k_scores + k);
      Dataset target = ds.with_targets(std::move(residuals[k]), Task::kRegression);
      stage.push_back(build_tree(target, stage_cfg, pool));
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < k_scores; ++k)
        scores[i][k] += cfg.learning_rate * stage[k].predict(ds.row(i));
    model.stages.push_back(std::move(stage));
    model.train_loss.push_back(training_loss());
  }
  return model;
}

}  // namespace slm
