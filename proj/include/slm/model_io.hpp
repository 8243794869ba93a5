#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "slm/ensemble.hpp"
#include "slm/tree.hpp"

namespace slm {

using Json = nlohmann::ordered_json;

inline constexpr int kModelFormatVersion = 1;

enum class ModelKind { kTree, kForest, kBoost };
std::string_view to_string(ModelKind kind);

// Any trained model plus the dataset metadata needed to read new files
// against it (feature order, class-label encoding).
struct Model {
  std::variant<SlmTree, ForestModel, BoostModel> body;
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;

  ModelKind kind() const;
  Task task() const;
  std::size_t n_features() const;
  double predict(std::span<const double> x) const;
};

Json tree_config_to_json(const TreeConfig& cfg);
TreeConfig tree_config_from_json(const Json& j);

Json tree_to_json(const SlmTree& tree);
SlmTree tree_from_json(const Json& j);

Json model_to_json(const Model& model);
Model model_from_json(const Json& j);

// Pretty-printed JSON followed by a newline. Identical models serialize to
// identical bytes.
std::string serialize_model(const Model& model);
Model deserialize_model(std::string_view text);

void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

}  // namespace slm
