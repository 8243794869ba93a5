#include <doctest.h>

#include <cmath>
#include <numeric>

#include "slm/model_io.hpp"
#include "slm/tree.hpp"

using namespace slm;

namespace {

Dataset xor_points() {
  return Dataset({0, 0, 0, 1, 1, 0, 1, 1}, 2, {0, 1, 1, 0}, {"x", "y"}, Task::kClassification,
                 {"0", "1"});
}

TreeConfig small_config(SearchMode mode) {
  TreeConfig cfg;
  cfg.search = mode;
  cfg.min_split = 2;
  cfg.min_leaf = 1;
  cfg.purity_tol = 0.0;
  cfg.prob.p = 128;
  cfg.swarm.max_iter = 40;
  return cfg;
}

double accuracy(const SlmTree& tree, const Dataset& ds) {
  std::size_t hit = 0;
  for (std::size_t i = 0; i < ds.rows(); ++i) hit += tree.predict(ds.row(i)) == ds.targets()[i];
  return static_cast<double>(hit) / static_cast<double>(ds.rows());
}

std::vector<std::size_t> node_depths(const SlmTree& tree) {
  std::vector<std::size_t> depth(tree.nodes.size(), 0);
  for (std::size_t i = 0; i < tree.nodes.size(); ++i)
    for (std::size_t c : tree.nodes[i].children) depth[c] = depth[i] + 1;
  return depth;
}

void check_structure(const SlmTree& tree, const TreeConfig& cfg) {
  auto depth = node_depths(tree);
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const auto& n = tree.nodes[i];
    CHECK(depth[i] <= cfg.max_depth);
    if (tree.task == Task::kClassification) {
      CHECK(std::accumulate(n.value.begin(), n.value.end(), 0.0) == doctest::Approx(1.0));
    }
    if (n.is_leaf()) {
      CHECK(n.children.empty());
      continue;
    }
    CHECK(n.children.size() == n.planes.size() + 1);
    CHECK(n.split_loss < n.impurity);
    std::size_t total = 0;
    for (std::size_t c : n.children) {
      CHECK(c > i);
      CHECK(tree.nodes[c].n_samples > 0);
      total += tree.nodes[c].n_samples;
    }
    CHECK(total == n.n_samples);
  }
}

}  // namespace

TEST_CASE("pure input is a single one-hot leaf") {
  Dataset ds({0, 1, 2, 3, 4, 5}, 2, {1, 1, 1}, {}, Task::kClassification, {"a", "b"});
  for (auto mode : {SearchMode::kApso, SearchMode::kProbabilistic}) {
    auto tree = build_tree(ds, small_config(mode));
    REQUIRE(tree.nodes.size() == 1);
    CHECK(tree.nodes[0].value == std::vector<double>{0.0, 1.0});
    CHECK(tree.predict(std::vector<double>{100.0, -3.0}) == 1.0);
    CHECK(tree.predict_proba(std::vector<double>{0.0, 0.0}) == std::vector<double>{0.0, 1.0});
  }
}

TEST_CASE("XOR needs two nested oblique splits") {
  auto ds = xor_points();
  std::vector<std::size_t> rows{0, 1, 2, 3};

  // No single line separates XOR: the best one-plane split has positive loss.
  auto cfg = small_config(SearchMode::kApso);
  auto root = search_node(ds, rows, cfg, 1);
  REQUIRE_FALSE(root.planes.empty());
  CHECK(root.best.loss > 0.0);

  for (std::uint64_t seed : {0u, 1u, 2u, 3u, 4u}) {
    cfg.seed = seed;
    cfg.max_depth = 2;
    auto tree = build_tree(ds, cfg);
    CHECK(accuracy(tree, ds) == 1.0);
    CHECK(tree.depth() == 2);
    check_structure(tree, cfg);
  }
}

TEST_CASE("samples on the threshold go to the >= child") {
  SlmTree tree;
  tree.n_features = 2;
  tree.n_classes = 2;
  tree.nodes.resize(3);
  tree.nodes[0].planes.push_back({{1}, {1.0}, 0.5});
  tree.nodes[0].children = {1, 2};
  tree.nodes[0].value = {0.5, 0.5};
  tree.nodes[1].value = {0.0, 1.0};
  tree.nodes[2].value = {1.0, 0.0};
  CHECK(tree.predict(std::vector<double>{9.0, 0.5}) == 1.0);
  CHECK(tree.predict(std::vector<double>{9.0, std::nextafter(0.5, 0.0)}) == 0.0);
  CHECK_THROWS_AS(tree.predict(std::vector<double>{0.5}), Error);
}

TEST_CASE("single-leaf tree predicts a constant") {
  Dataset ds({1, 2, 3}, 1, {4.0, 4.0, 4.0}, {}, Task::kRegression);
  auto tree = build_tree(ds, TreeConfig{});
  REQUIRE(tree.leaf_count() == 1);
  for (double x : {-1e9, 0.0, 2.5, 1e9}) CHECK(tree.predict(std::vector<double>{x}) == 4.0);
  CHECK_THROWS_AS(tree.predict_proba(std::vector<double>{0.0}), Error);
}

TEST_CASE("uniform two-class leaf reports one half each") {
  Dataset ds({0, 0}, 1, {0, 1}, {}, Task::kClassification, {"a", "b"});
  auto tree = build_tree(ds, TreeConfig{});
  CHECK(tree.predict_proba(std::vector<double>{0.0}) == std::vector<double>{0.5, 0.5});
  CHECK(tree.predict(std::vector<double>{0.0}) == 0.0);
}

TEST_CASE("trees fit noiseless moons exactly and keep the invariants") {
  auto ds = generate("moons-2", 300, 0.0, 5);
  for (auto mode : {SearchMode::kApso, SearchMode::kProbabilistic}) {
    auto cfg = small_config(mode);
    cfg.max_depth = 30;
    auto tree = build_tree(ds, cfg);
    CHECK(accuracy(tree, ds) == 1.0);
    check_structure(tree, cfg);
    for (std::size_t i = 0; i < ds.rows(); ++i) CHECK(tree.predict(ds.row(i)) == ds.targets()[i]);
  }
}

TEST_CASE("predict_proba sums to one on random inputs") {
  auto ds = generate("moons-4", 200, 0.2, 7);
  auto tree = build_tree(ds, TreeConfig{});
  Rng rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> x{u(rng), u(rng)};
    auto p = tree.predict_proba(x);
    CHECK(p.size() == 4);
    CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0));
    CHECK(tree.predict(x) == static_cast<double>(argmax_class(p)));
  }
}

TEST_CASE("stopping rules") {
  auto ds = generate("moons-2", 400, 0.3, 1);
  TreeConfig cfg;
  cfg.max_depth = 3;
  auto shallow = build_tree(ds, cfg);
  CHECK(shallow.depth() <= 3);
  check_structure(shallow, cfg);

  cfg = TreeConfig{};
  cfg.min_split = 500;
  CHECK(build_tree(ds, cfg).leaf_count() == 1);

  cfg = TreeConfig{};
  cfg.min_leaf = 30;
  cfg.min_split = 60;
  auto coarse = build_tree(ds, cfg);
  for (const auto& n : coarse.nodes) CHECK(n.n_samples >= 30);
}

TEST_CASE("regression tree") {
  auto ds = generate("friedman1", 400, 0.0, 2);
  auto y = ds.targets();
  const double var = node_impurity(y, Task::kRegression);
  for (auto mode : {SearchMode::kApso, SearchMode::kProbabilistic}) {
    TreeConfig cfg;
    cfg.search = mode;
    cfg.prob.p = 128;
    cfg.swarm.max_iter = 30;
    auto tree = build_tree(ds, cfg);
    check_structure(tree, cfg);
    double sse = 0.0;
    for (std::size_t i = 0; i < ds.rows(); ++i) sse += std::pow(tree.predict(ds.row(i)) - y[i], 2);
    CHECK(sse / static_cast<double>(ds.rows()) < 0.25 * var);

    // Each leaf predicts the mean of the training targets routed to it.
    std::vector<double> sum(tree.nodes.size(), 0.0);
    std::vector<std::size_t> count(tree.nodes.size(), 0);
    for (std::size_t i = 0; i < ds.rows(); ++i) {
      auto idx = static_cast<std::size_t>(&tree.leaf_for(ds.row(i)) - tree.nodes.data());
      sum[idx] += y[i];
      ++count[idx];
    }
    for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
      if (!tree.nodes[k].is_leaf()) continue;
      CHECK(count[k] == tree.nodes[k].n_samples);
      CHECK(tree.nodes[k].value[0] == doctest::Approx(sum[k] / static_cast<double>(count[k])));
    }
  }
}

TEST_CASE("multiway probabilistic splits partition the node") {
  auto ds = generate("moons-4", 400, 0.1, 3);
  TreeConfig cfg;
  cfg.search = SearchMode::kProbabilistic;
  cfg.prob.q = 3;
  cfg.prob.cos_max = 0.8;
  cfg.prob.p = 128;
  auto tree = build_tree(ds, cfg);
  check_structure(tree, cfg);
  std::size_t widest = 0;
  for (const auto& n : tree.nodes) widest = std::max(widest, n.children.size());
  CHECK(widest >= 3);
  CHECK(widest <= 4);
}

TEST_CASE("building is deterministic across seeds, repeats and pool sizes") {
  auto ds = generate("circle-and-ring", 300, 0.1, 4);
  for (auto mode : {SearchMode::kApso, SearchMode::kProbabilistic}) {
    TreeConfig cfg;
    cfg.search = mode;
    cfg.seed = 17;
    cfg.prob.p = 96;
    cfg.swarm.max_iter = 30;
    WorkerPool one(1), four(4);
    auto a = tree_to_json(build_tree(ds, cfg, one)).dump();
    auto b = tree_to_json(build_tree(ds, cfg, four)).dump();
    auto c = tree_to_json(build_tree(ds, cfg, one)).dump();
    CHECK(a == b);
    CHECK(a == c);
    cfg.seed = 18;
    CHECK(tree_to_json(build_tree(ds, cfg, one)).dump() != a);
  }
}

TEST_CASE("rows subset and duplicate rows") {
  auto ds = generate("moons-2", 100, 0.1, 9);
  std::vector<std::size_t> rows{0, 0, 0, 1, 50, 51, 51, 99};
  TreeConfig cfg = small_config(SearchMode::kApso);
  auto tree = build_tree(ds, rows, cfg);
  CHECK(tree.nodes[0].n_samples == rows.size());
  check_structure(tree, cfg);
}

TEST_CASE("tree argument errors") {
  auto ds = xor_points();
  CHECK_THROWS_AS(build_tree(ds, std::vector<std::size_t>{}, TreeConfig{}), Error);
  TreeConfig bad;
  bad.min_leaf = 6;
  bad.min_split = 10;
  CHECK_THROWS_AS(build_tree(ds, bad), Error);
  bad = TreeConfig{};
  bad.bins = 1;
  CHECK_THROWS_AS(build_tree(ds, bad), Error);
  CHECK(parse_search_mode("prob") == SearchMode::kProbabilistic);
  CHECK(parse_search_mode("apso") == SearchMode::kApso);
  CHECK_THROWS_AS(parse_search_mode("grid"), Error);
}
