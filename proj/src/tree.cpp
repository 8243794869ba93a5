#include "slm/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace slm {

namespace {

Hyperplane sparse_plane(const ProjectionVector& v, double threshold) {
  Hyperplane h;
  for (std::size_t d = 0; d < v.coeffs.size(); ++d) {
    if (v.coeffs[d] == 0.0) continue;
    h.dims.push_back(d);
    h.coeffs.push_back(v.coeffs[d]);
  }
  h.threshold = threshold;
  return h;
}

std::vector<double> leaf_value(std::span<const double> targets, Task task, std::size_t n_classes) {
  if (task == Task::kRegression) {
    return {std::accumulate(targets.begin(), targets.end(), 0.0) / static_cast<double>(targets.size())};
  }
  std::vector<double> dist(n_classes, 0.0);
  for (double t : targets) dist[static_cast<std::size_t>(t)] += 1.0;
  for (double& p : dist) p /= static_cast<double>(targets.size());
  return dist;
}

std::size_t route(std::span<const Hyperplane> planes, std::span<const double> x) {
  for (std::size_t k = 0; k < planes.size(); ++k)
    if (planes[k].right_of(x)) return k;
  return planes.size();
}

NodeSearch search_probabilistic(const Dataset& ds, std::span<const std::size_t> rows,
                                std::span<const double> targets, std::span<const std::size_t> top,
                                const TreeConfig& cfg, std::uint64_t seed, WorkerPool& pool) {
  Rng rng(seed);
  std::vector<ProjectionVector> candidates;
  std::vector<Hyperplane> sparse;
  candidates.reserve(cfg.prob.p);
  sparse.reserve(cfg.prob.p);
  for (std::size_t i = 0; i < cfg.prob.p; ++i) {
    candidates.push_back(sample_projection(top, ds.cols(), cfg.prob, rng));
    sparse.push_back(sparse_plane(candidates.back(), 0.0));
  }
  auto records = evaluate_generated(
      candidates.size(),
      [&](std::size_t i, std::vector<double>& values) {
        project_rows(ds, rows, sparse[i].dims, sparse[i].coeffs, values);
      },
      targets, ds.task(), ds.n_classes(), cfg.bins, cfg.min_leaf, pool);

  std::vector<double> losses(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) losses[i] = records[i].loss;
  auto kept = select_diverse(candidates, losses, cfg.prob.q, cfg.prob.cos_max);

  NodeSearch out;
  out.evaluations = candidates.size();
  out.best = records[kept.front()];
  for (std::size_t idx : kept) {
    if (records[idx].degenerate) continue;
    Hyperplane h = sparse[idx];
    h.threshold = records[idx].threshold;
    out.planes.push_back(std::move(h));
  }
  return out;
}

NodeSearch search_apso(const Dataset& ds, std::span<const std::size_t> rows,
                       std::span<const double> targets, std::span<const std::size_t> top,
                       const TreeConfig& cfg, std::uint64_t seed, WorkerPool& pool) {
  const std::size_t n = top.size();
  SwarmConfig swarm = cfg.swarm;
  swarm.dim = n;
  swarm.lower.assign(n, -1.0);
  swarm.upper.assign(n, 1.0);
  swarm.seed = seed;
  const double unsplit = node_impurity(targets, ds.task(), ds.n_classes());

  auto evaluate = [&](std::span<const double> position) -> SplitRecord {
    double norm = std::sqrt(std::inner_product(position.begin(), position.end(), position.begin(), 0.0));
    if (!(norm > 0.0)) {
      SplitRecord r;
      r.loss = unsplit;
      return r;
    }
    std::vector<double> coeffs(position.begin(), position.end());
    for (double& c : coeffs) c /= norm;
    Projected1D p{{}, targets, ds.task(), ds.n_classes()};
    project_rows(ds, rows, top, coeffs, p.values);
    return best_split(p, cfg.bins, cfg.min_leaf);
  };

  auto result = optimize([&](std::span<const double> pos) { return evaluate(pos).loss; }, swarm, pool);

  NodeSearch out;
  out.evaluations = result.evaluations;
  out.best = evaluate(result.best_position);
  if (!out.best.degenerate) {
    double norm = std::sqrt(std::inner_product(result.best_position.begin(), result.best_position.end(),
                                               result.best_position.begin(), 0.0));
    Hyperplane h;
    h.dims.assign(top.begin(), top.end());
    for (double c : result.best_position) h.coeffs.push_back(c / norm);
    h.threshold = out.best.threshold;
    out.planes.push_back(std::move(h));
  }
  return out;
}

struct Builder {
  const Dataset& ds;
  const TreeConfig& cfg;
  WorkerPool& pool;
  SlmTree& tree;

  std::size_t build(std::vector<std::size_t> rows, std::size_t depth) {
    const std::size_t index = tree.nodes.size();
    tree.nodes.emplace_back();

    auto targets = gather_targets(ds, rows);
    SlmNode node;
    node.n_samples = rows.size();
    node.value = leaf_value(targets, ds.task(), ds.n_classes());
    node.impurity = node_impurity(targets, ds.task(), ds.n_classes());
    node.split_loss = node.impurity;

    bool stop = depth >= cfg.max_depth || rows.size() < cfg.min_split;
    if (ds.task() == Task::kClassification)
      stop = stop || *std::max_element(node.value.begin(), node.value.end()) >= 1.0 - cfg.purity_tol;
    else
      stop = stop || node.impurity <= cfg.mse_tol;

    std::vector<std::vector<std::size_t>> parts;
    if (!stop) {
      auto found = search_node(ds, rows, cfg, derive_seed(cfg.seed, index), pool);
      if (!found.planes.empty() && !found.best.degenerate && found.best.loss < node.impurity) {
        node.split_loss = found.best.loss;
        node.planes = std::move(found.planes);
        parts = partition(rows, node.planes);
      }
    }
    if (parts.size() < 2) node.planes.clear();
    tree.nodes[index] = std::move(node);

    std::vector<std::size_t> children;
    for (auto& part : parts) children.push_back(build(std::move(part), depth + 1));
    tree.nodes[index].children = std::move(children);
    return index;
  }

  // Routes rows through the decision list, dropping planes that claim no
  // training rows so every child is non-empty.
  std::vector<std::vector<std::size_t>> partition(std::span<const std::size_t> rows,
                                                  std::vector<Hyperplane>& planes) const {
    while (!planes.empty()) {
      std::vector<std::vector<std::size_t>> parts(planes.size() + 1);
      for (std::size_t r : rows) parts[route(planes, ds.row(r))].push_back(r);
      auto empty = std::find_if(parts.begin(), parts.end(), [](const auto& p) { return p.empty(); });
      if (empty == parts.end()) return parts;
      auto k = static_cast<std::size_t>(empty - parts.begin());
      planes.erase(planes.begin() + static_cast<std::ptrdiff_t>(std::min(k, planes.size() - 1)));
    }
    return {};
  }
};

}  // namespace

std::string_view to_string(SearchMode mode) {
  return mode == SearchMode::kApso ? "apso" : "prob";
}

SearchMode parse_search_mode(std::string_view text) {
  if (text == "apso") return SearchMode::kApso;
  if (text == "prob" || text == "probabilistic") return SearchMode::kProbabilistic;
  throw Error("unknown search mode '" + std::string(text) + "' (expected prob or apso)");
}

std::size_t TreeConfig::effective_top_n(std::size_t dims) const {
  return top_n == 0 ? std::min<std::size_t>(dims, 10) : std::min(top_n, dims);
}

void TreeConfig::validate() const {
  if (min_leaf < 1) throw Error("min_leaf must be at least 1");
  if (min_split < 2 * min_leaf) throw Error("min_split must be at least 2 * min_leaf");
  if (bins < 2) throw Error("bins must be at least 2");
  if (!(purity_tol >= 0.0 && purity_tol < 1.0)) throw Error("purity_tol must lie in [0, 1)");
  if (!(mse_tol >= 0.0)) throw Error("mse_tol must be non-negative");
  if (swarm.population < 2) throw Error("swarm population must be at least 2");
}

const SlmNode& SlmTree::leaf_for(std::span<const double> x) const {
  if (x.size() != n_features)
    throw Error("expected " + std::to_string(n_features) + " features, got " + std::to_string(x.size()));
  const SlmNode* node = &nodes.at(0);
  while (!node->is_leaf()) node = &nodes[node->children[route(node->planes, x)]];
  return *node;
}

double SlmTree::predict(std::span<const double> x) const {
  const auto& leaf = leaf_for(x);
  if (task == Task::kRegression) return leaf.value[0];
  return static_cast<double>(argmax_class(leaf.value));
}

std::vector<double> SlmTree::predict_proba(std::span<const double> x) const {
  if (task != Task::kClassification) throw Error("predict_proba requires a classification tree");
  return leaf_for(x).value;
}

std::size_t SlmTree::depth() const {
  std::vector<std::size_t> level(nodes.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    for (std::size_t c : nodes[i].children) level[c] = level[i] + 1;
  }
  return deepest;
}

std::size_t SlmTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const SlmNode& n) { return n.is_leaf(); }));
}

std::size_t argmax_class(std::span<const double> distribution) {
  return static_cast<std::size_t>(std::max_element(distribution.begin(), distribution.end()) -
                                  distribution.begin());
}

NodeSearch search_node(const Dataset& ds, std::span<const std::size_t> rows, const TreeConfig& cfg,
                       std::uint64_t seed, WorkerPool& pool) {
  if (rows.empty()) throw Error("search_node: empty row set");
  auto ranking = rank_dimensions(ds, rows, cfg.bins, cfg.min_leaf);
  std::span<const std::size_t> top(ranking.order.data(), cfg.effective_top_n(ds.cols()));
  auto targets = gather_targets(ds, rows);
  if (cfg.search == SearchMode::kProbabilistic)
    return search_probabilistic(ds, rows, targets, top, cfg, seed, pool);
  return search_apso(ds, rows, targets, top, cfg, seed, pool);
}

SlmTree build_tree(const Dataset& ds, std::span<const std::size_t> rows, const TreeConfig& cfg,
                   WorkerPool& pool) {
  if (rows.empty()) throw Error("build_tree: empty row set");
  cfg.validate();
  cfg.prob.validate(ds.cols());
  SlmTree tree;
  tree.task = ds.task();
  tree.n_features = ds.cols();
  tree.n_classes = ds.n_classes();
  tree.config = cfg;
  Builder builder{ds, cfg, pool, tree};
  builder.build(std::vector<std::size_t>(rows.begin(), rows.end()), 0);
  return tree;
}

SlmTree build_tree(const Dataset& ds, const TreeConfig& cfg, WorkerPool& pool) {
  std::vector<std::size_t> rows(ds.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return build_tree(ds, rows, cfg, pool);
}

}  // namespace slm
