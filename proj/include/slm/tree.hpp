#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "slm/dataset.hpp"
#include "slm/dft.hpp"
#include "slm/parallel.hpp"
#include "slm/probsearch.hpp"
#include "slm/pso.hpp"

namespace slm {

enum class SearchMode { kProbabilistic, kApso };
std::string_view to_string(SearchMode mode);
SearchMode parse_search_mode(std::string_view text);

struct TreeConfig {
  SearchMode search = SearchMode::kApso;
  std::size_t top_n = 0;  // dimensions searched per node; 0 means min(D, 10)
  std::size_t max_depth = 10;
  std::size_t min_split = 10;
  std::size_t min_leaf = 2;
  double purity_tol = 0.01;
  double mse_tol = 0.0;
  std::size_t bins = 32;
  ProbSearchParams prob;
  SwarmConfig swarm;  // dim, bounds and seed are filled in per node
  std::uint64_t seed = 0;

  std::size_t effective_top_n(std::size_t dims) const;
  void validate() const;
};

// a^T x_sub >= threshold, with x_sub = x restricted to `dims`.
struct Hyperplane {
  std::vector<std::size_t> dims;
  std::vector<double> coeffs;
  double threshold = 0.0;

  bool right_of(std::span<const double> x) const {
    return project_point(x, dims, coeffs) >= threshold;
  }
};

// An internal node routes a sample to child k for the first plane k it lies
// on the >= side of, and to the last child when it matches none. A binary
// node therefore has children {>= side, < side}. Leaves have no planes.
struct SlmNode {
  std::vector<Hyperplane> planes;
  std::vector<std::size_t> children;  // indices into SlmTree::nodes
  std::vector<double> value;          // class distribution, or {mean}
  std::size_t n_samples = 0;
  double impurity = 0.0;              // unsplit loss of the node's samples
  double split_loss = 0.0;            // DFT loss of the first plane

  bool is_leaf() const { return planes.empty(); }
};

class SlmTree {
 public:
  Task task = Task::kClassification;
  std::size_t n_features = 0;
  std::size_t n_classes = 0;
  TreeConfig config;
  std::vector<SlmNode> nodes;  // nodes[0] is the root

  const SlmNode& leaf_for(std::span<const double> x) const;
  // Class id (as a double) or regression mean.
  double predict(std::span<const double> x) const;
  std::vector<double> predict_proba(std::span<const double> x) const;

  std::size_t depth() const;
  std::size_t leaf_count() const;
};

// The outcome of searching one node: accepted planes in decision-list order
// and the DFT record of the best one.
struct NodeSearch {
  std::vector<Hyperplane> planes;
  SplitRecord best;
  std::size_t evaluations = 0;  // projections scored
};

// Ranks the node's raw dimensions, restricts the search to the top_n of them
// and runs the configured search. Pure function of its arguments.
NodeSearch search_node(const Dataset& ds, std::span<const std::size_t> rows, const TreeConfig& cfg,
                       std::uint64_t seed, WorkerPool& pool = default_pool());

SlmTree build_tree(const Dataset& ds, std::span<const std::size_t> rows, const TreeConfig& cfg,
                   WorkerPool& pool = default_pool());
SlmTree build_tree(const Dataset& ds, const TreeConfig& cfg, WorkerPool& pool = default_pool());

// Class id with the highest probability; ties go to the smallest id.
std::size_t argmax_class(std::span<const double> distribution);

}  // namespace slm
