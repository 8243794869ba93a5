#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "slm/types.hpp"

namespace slm {

// Immutable N x D feature matrix (row-major) with class labels or real targets.
//
// Classification labels are stored as integral doubles in [0, n_classes); the
// original label tokens are kept in class_names so that files encoded with a
// different first-appearance order can be mapped back onto the same ids.
class Dataset {
 public:
  Dataset(std::vector<double> features, std::size_t n_features,
          std::vector<double> targets, std::vector<std::string> feature_names,
          Task task, std::vector<std::string> class_names = {});

  std::size_t rows() const { return targets_->size(); }
  std::size_t cols() const { return n_features_; }
  Task task() const { return task_; }
  std::size_t n_classes() const { return class_names_.size(); }

  std::span<const double> row(std::size_t i) const {
    return {features_->data() + i * n_features_, n_features_};
  }
  double at(std::size_t i, std::size_t d) const {
    return (*features_)[i * n_features_ + d];
  }
  std::span<const double> features() const { return *features_; }
  std::span<const double> targets() const { return *targets_; }
  int label(std::size_t i) const { return static_cast<int>((*targets_)[i]); }

  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const std::vector<std::string>& class_names() const { return class_names_; }

  // Rows in the given order (duplicates allowed); class encoding is kept.
  Dataset subset(std::span<const std::size_t> rows) const;

  // Same features (shared, not copied) with new targets; used by boosting.
  Dataset with_targets(std::vector<double> targets, Task task) const;

 private:
  std::shared_ptr<const std::vector<double>> features_;
  std::shared_ptr<const std::vector<double>> targets_;
  std::size_t n_features_;
  std::vector<std::string> feature_names_;
  std::vector<std::string> class_names_;
  Task task_;
};

// Synthetic generators: circle-and-ring, moons-2, moons-4 (classification)
// and friedman1..3 (regression). Classification rows are emitted grouped by
// class, so a CSV round trip keeps the label encoding.
Dataset generate(std::string_view name, std::size_t n_samples, double noise,
                 std::uint64_t seed);

std::span<const std::string_view> generator_names();
bool is_generator(std::string_view name);
Task generator_task(std::string_view name);

// Comma-separated, header row, '.' decimal. Classification labels are encoded
// by first appearance unless `class_names` supplies the encoding.
Dataset load_csv(const std::filesystem::path& path, std::string_view target_column,
                 Task task, std::span<const std::string> class_names = {});

// Writes features then a target column; values use the shortest round-trip
// representation.
void write_csv(const Dataset& ds, const std::filesystem::path& path,
               std::string_view target_column = "target");

struct SplitSpec {
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

struct TrainTest {
  Dataset train;
  Dataset test;
};

// Stratified per class for classification; indices are returned sorted.
SplitIndices split_indices(const Dataset& ds, const SplitSpec& spec);
TrainTest split(const Dataset& ds, const SplitSpec& spec);

}  // namespace slm
