#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "slm/ensemble.hpp"
#include "slm/model_io.hpp"
#include "slm/tree.hpp"

namespace slm {

// slm, slm-forest, slm-boost (classification); slr, slr-forest, slr-boost
// (regression).
struct ModelSpec {
  Task task = Task::kClassification;
  ModelKind kind = ModelKind::kTree;
};
ModelSpec parse_model_spec(std::string_view name);
std::string model_spec_name(const ModelSpec& spec);

// Every training knob under the name of its command-line flag. The CLI, config
// files and the scripting facade all read and write parameters through
// set/get, so the names cannot drift apart.
struct TrainParams {
  std::string model = "slm";
  SearchMode search = SearchMode::kApso;
  std::size_t trees = 30;
  bool bootstrap = true;
  double lr = 0.1;
  std::size_t boost_depth = 4;
  std::size_t max_depth = 10;
  std::size_t min_split = 10;
  std::size_t min_leaf = 2;
  double purity_tol = 0.01;
  double mse_tol = 0.0;
  std::size_t bins = 32;
  std::size_t top_n = 0;
  std::size_t p = 512;
  std::size_t q = 1;
  double cos_max = 0.9;
  double alpha0 = 10.0;
  double alpha = 0.3;
  double beta = 0.2;
  std::size_t active_coeffs = 0;
  std::size_t population = 20;
  std::size_t iterations = 110;
  bool adaptive = true;
  std::uint64_t seed = 0;
  std::size_t workers = 0;  // 0 means one per physical core

  struct Key {
    std::string_view name;
    std::string_view help;
  };
  static std::span<const Key> keys();
  static bool has_key(std::string_view name);

  void set(std::string_view key, std::string_view value);
  std::string get(std::string_view key) const;

  ModelSpec spec() const { return parse_model_spec(model); }
  TreeConfig tree_config() const;
  ForestConfig forest_config() const;
  BoostConfig boost_config() const;
};

// Trains the model named by params.model. The dataset's task must match.
Model train_model(const Dataset& ds, const TrainParams& params, WorkerPool& pool = default_pool());

struct Metric {
  std::string name;  // "accuracy" or "mse"
  double value = 0.0;
};

Metric evaluate(const Model& model, const Dataset& ds);

}  // namespace slm
