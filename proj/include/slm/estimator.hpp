#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "slm/model_io.hpp"
#include "slm/train.hpp"

namespace slm {

// fit / predict / save / load over flat row-major arrays, for scripting
// wrappers. Parameters use the command-line flag names (see TrainParams).
// Classification targets may be any real label values; predictions return
// the same values.
class Estimator {
 public:
  using Params = std::map<std::string, std::string>;

  static Estimator fit(std::span<const double> X, std::size_t n_features, std::span<const double> y,
                       const Params& params = {});
  static Estimator load(const std::filesystem::path& path);

  // One prediction per row of X (M x n_features, row-major).
  std::vector<double> predict(std::span<const double> X) const;
  void save(const std::filesystem::path& path) const;

  // Releases the model; any later call throws.
  void close();
  bool is_open() const { return model_ != nullptr; }

  Task task() const;
  std::size_t n_features() const;
  const Params& params() const { return params_; }
  const Model& model() const;

 private:
  std::shared_ptr<const Model> model_;
  Params params_;
  std::vector<double> label_values_;  // class id -> original label
};

}  // namespace slm
