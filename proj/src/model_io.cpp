#include "slm/model_io.hpp"

#include <fstream>
#include <sstream>

namespace slm {

namespace {

constexpr std::string_view kFormatName = "slm-model";

template <typename T>
T field(const Json& j, std::string_view key) {
  auto it = j.find(key);
  if (it == j.end()) throw Error("model file: missing field '" + std::string(key) + "'");
  try {
    return it->template get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error("model file: bad field '" + std::string(key) + "': " + e.what());
  }
}

const Json& object(const Json& j, std::string_view key) {
  auto it = j.find(key);
  if (it == j.end() || !(it->is_object() || it->is_array()))
    throw Error("model file: missing section '" + std::string(key) + "'");
  return *it;
}

Json node_to_json(const SlmTree& tree, std::size_t index) {
  const SlmNode& node = tree.nodes[index];
  Json j;
  j["n"] = node.n_samples;
  j["impurity"] = node.impurity;
  j["value"] = node.value;
  if (node.is_leaf()) return j;
  j["split_loss"] = node.split_loss;
  Json planes = Json::array();
  for (const auto& h : node.planes)
    planes.push_back(Json{{"dims", h.dims}, {"coeffs", h.coeffs}, {"threshold", h.threshold}});
  j["planes"] = std::move(planes);
  Json children = Json::array();
  for (std::size_t c : node.children) children.push_back(node_to_json(tree, c));
  j["children"] = std::move(children);
  return j;
}

std::size_t node_from_json(const Json& j, SlmTree& tree, std::size_t depth) {
  if (depth > 4096) throw Error("model file: tree nesting too deep");
  const std::size_t index = tree.nodes.size();
  tree.nodes.emplace_back();
  SlmNode node;
  node.n_samples = field<std::size_t>(j, "n");
  node.impurity = field<double>(j, "impurity");
  node.value = field<std::vector<double>>(j, "value");
  const std::size_t expected = tree.task == Task::kRegression ? 1 : tree.n_classes;
  if (node.value.size() != expected) throw Error("model file: leaf payload has the wrong size");
  std::vector<Json> children;
  if (j.contains("planes")) {
    node.split_loss = field<double>(j, "split_loss");
    for (const auto& p : object(j, "planes")) {
      Hyperplane h;
      h.dims = field<std::vector<std::size_t>>(p, "dims");
      h.coeffs = field<std::vector<double>>(p, "coeffs");
      h.threshold = field<double>(p, "threshold");
      if (h.dims.size() != h.coeffs.size()) throw Error("model file: dims/coeffs length mismatch");
      for (std::size_t d : h.dims)
        if (d >= tree.n_features) throw Error("model file: plane dimension out of range");
      node.planes.push_back(std::move(h));
    }
    children = field<std::vector<Json>>(j, "children");
    if (children.size() != node.planes.size() + 1)
      throw Error("model file: an internal node needs one more child than planes");
  }
  tree.nodes[index] = std::move(node);
  std::vector<std::size_t> ids;
  for (const auto& c : children) ids.push_back(node_from_json(c, tree, depth + 1));
  tree.nodes[index].children = std::move(ids);
  return index;
}

Json forest_to_json(const ForestModel& f) {
  Json trees = Json::array();
  for (const auto& t : f.trees) trees.push_back(tree_to_json(t));
  return Json{{"seed", f.seed}, {"bootstrap", f.bootstrap}, {"trees", std::move(trees)}};
}

Json boost_to_json(const BoostModel& b) {
  Json stages = Json::array();
  for (const auto& stage : b.stages) {
    Json s = Json::array();
    for (const auto& t : stage) s.push_back(tree_to_json(t));
    stages.push_back(std::move(s));
  }
  return Json{{"learning_rate", b.learning_rate},
              {"base_score", b.base_score},
              {"train_loss", b.train_loss},
              {"stages", std::move(stages)}};
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kTree: return "tree";
    case ModelKind::kForest: return "forest";
    case ModelKind::kBoost: return "boost";
  }
  return "unknown";
}

ModelKind Model::kind() const { return static_cast<ModelKind>(body.index()); }

Task Model::task() const {
  return std::visit([](const auto& m) { return m.task; }, body);
}

std::size_t Model::n_features() const {
  return std::visit([](const auto& m) { return m.n_features; }, body);
}

double Model::predict(std::span<const double> x) const {
  return std::visit([&](const auto& m) { return m.predict(x); }, body);
}

Json tree_config_to_json(const TreeConfig& c) {
  return Json{
      {"search", to_string(c.search)},
      {"top_n", c.top_n},
      {"max_depth", c.max_depth},
      {"min_split", c.min_split},
      {"min_leaf", c.min_leaf},
      {"purity_tol", c.purity_tol},
      {"mse_tol", c.mse_tol},
      {"bins", c.bins},
      {"seed", c.seed},
      {"prob",
       {{"alpha0", c.prob.alpha0},
        {"alpha", c.prob.alpha},
        {"beta", c.prob.beta},
        {"R", c.prob.R},
        {"p", c.prob.p},
        {"q", c.prob.q},
        {"cos_max", c.prob.cos_max}}},
      {"swarm",
       {{"population", c.swarm.population},
        {"max_iter", c.swarm.max_iter},
        {"omega", c.swarm.omega},
        {"c1", c.swarm.c1},
        {"c2", c.swarm.c2},
        {"vmax", c.swarm.vmax},
        {"adaptive", c.swarm.adaptive},
        {"patience", c.swarm.patience},
        {"c_min", c.swarm.c_min},
        {"c_max", c.swarm.c_max},
        {"c_sum_max", c.swarm.c_sum_max},
        {"sigma_max", c.swarm.sigma_max},
        {"sigma_min", c.swarm.sigma_min}}},
  };
}

TreeConfig tree_config_from_json(const Json& j) {
  TreeConfig c;
  c.search = parse_search_mode(field<std::string>(j, "search"));
  c.top_n = field<std::size_t>(j, "top_n");
  c.max_depth = field<std::size_t>(j, "max_depth");
  c.min_split = field<std::size_t>(j, "min_split");
  c.min_leaf = field<std::size_t>(j, "min_leaf");
  c.purity_tol = field<double>(j, "purity_tol");
  c.mse_tol = field<double>(j, "mse_tol");
  c.bins = field<std::size_t>(j, "bins");
  c.seed = field<std::uint64_t>(j, "seed");
  const Json& p = object(j, "prob");
  c.prob.alpha0 = field<double>(p, "alpha0");
  c.prob.alpha = field<double>(p, "alpha");
  c.prob.beta = field<double>(p, "beta");
  c.prob.R = field<std::size_t>(p, "R");
  c.prob.p = field<std::size_t>(p, "p");
  c.prob.q = field<std::size_t>(p, "q");
  c.prob.cos_max = field<double>(p, "cos_max");
  const Json& s = object(j, "swarm");
  c.swarm.population = field<std::size_t>(s, "population");
  c.swarm.max_iter = field<std::size_t>(s, "max_iter");
  c.swarm.omega = field<double>(s, "omega");
  c.swarm.c1 = field<double>(s, "c1");
  c.swarm.c2 = field<double>(s, "c2");
  c.swarm.vmax = field<double>(s, "vmax");
  c.swarm.adaptive = field<bool>(s, "adaptive");
  c.swarm.patience = field<std::size_t>(s, "patience");
  c.swarm.c_min = field<double>(s, "c_min");
  c.swarm.c_max = field<double>(s, "c_max");
  c.swarm.c_sum_max = field<double>(s, "c_sum_max");
  c.swarm.sigma_max = field<double>(s, "sigma_max");
  c.swarm.sigma_min = field<double>(s, "sigma_min");
  return c;
}

Json tree_to_json(const SlmTree& tree) {
  Json j;
  j["task"] = to_string(tree.task);
  j["n_features"] = tree.n_features;
  j["n_classes"] = tree.n_classes;
  j["config"] = tree_config_to_json(tree.config);
  j["root"] = tree.nodes.empty() ? Json() : node_to_json(tree, 0);
  return j;
}

SlmTree tree_from_json(const Json& j) {
  SlmTree tree;
  tree.task = parse_task(field<std::string>(j, "task"));
  tree.n_features = field<std::size_t>(j, "n_features");
  tree.n_classes = field<std::size_t>(j, "n_classes");
  tree.config = tree_config_from_json(object(j, "config"));
  node_from_json(object(j, "root"), tree, 0);
  return tree;
}

Json model_to_json(const Model& model) {
  Json j;
  j["format"] = kFormatName;
  j["version"] = kModelFormatVersion;
  j["kind"] = to_string(model.kind());
  j["task"] = to_string(model.task());
  j["n_features"] = model.n_features();
  j["feature_names"] = model.feature_names;
  j["class_names"] = model.class_names;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, SlmTree>) j["tree"] = tree_to_json(m);
        if constexpr (std::is_same_v<T, ForestModel>) j["forest"] = forest_to_json(m);
        if constexpr (std::is_same_v<T, BoostModel>) j["boost"] = boost_to_json(m);
      },
      model.body);
  return j;
}

Model model_from_json(const Json& j) {
  if (!j.is_object() || field<std::string>(j, "format") != kFormatName)
    throw Error("not an slm model file");
  const int version = field<int>(j, "version");
  if (version != kModelFormatVersion)
    throw Error("unsupported model format version " + std::to_string(version));

  const Task task = parse_task(field<std::string>(j, "task"));
  const auto n_features = field<std::size_t>(j, "n_features");
  Model model{SlmTree{}, field<std::vector<std::string>>(j, "feature_names"),
              field<std::vector<std::string>>(j, "class_names")};
  const std::size_t n_classes = model.class_names.size();

  const auto kind = field<std::string>(j, "kind");
  if (kind == "tree") {
    model.body = tree_from_json(object(j, "tree"));
  } else if (kind == "forest") {
    const Json& f = object(j, "forest");
    ForestModel forest;
    forest.task = task;
    forest.n_features = n_features;
    forest.n_classes = n_classes;
    forest.seed = field<std::uint64_t>(f, "seed");
    forest.bootstrap = field<bool>(f, "bootstrap");
    for (const auto& t : object(f, "trees")) forest.trees.push_back(tree_from_json(t));
    if (forest.trees.empty()) throw Error("model file: forest without trees");
    model.body = std::move(forest);
  } else if (kind == "boost") {
    const Json& b = object(j, "boost");
    BoostModel boost;
    boost.task = task;
    boost.n_features = n_features;
    boost.n_classes = n_classes;
    boost.learning_rate = field<double>(b, "learning_rate");
    boost.base_score = field<std::vector<double>>(b, "base_score");
    boost.train_loss = field<std::vector<double>>(b, "train_loss");
    for (const auto& s : object(b, "stages")) {
      std::vector<SlmTree> stage;
      for (const auto& t : s) stage.push_back(tree_from_json(t));
      if (stage.size() != boost.base_score.size()) throw Error("model file: stage width mismatch");
      boost.stages.push_back(std::move(stage));
    }
    model.body = std::move(boost);
  } else {
    throw Error("model file: unknown kind '" + kind + "'");
  }
  if (model.task() != task || model.n_features() != n_features)
    throw Error("model file: header disagrees with model body");
  return model;
}

std::string serialize_model(const Model& model) { return model_to_json(model).dump(1, '\t') + "\n"; }

Model deserialize_model(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("model file is not valid JSON: ") + e.what());
  }
  return model_from_json(j);
}

void save_model(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << serialize_model(model);
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_model(buf.str());
}

}  // namespace slm
