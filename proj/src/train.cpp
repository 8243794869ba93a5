#include "slm/train.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <functional>

namespace slm {

namespace {

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  throw Error("invalid value '" + std::string(value) + "' for " + std::string(key) + " (expected " +
              std::string(expected) + ")");
}

template <typename T>
T parse_integer(std::string_view key, std::string_view value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) bad_value(key, value, "a non-negative integer");
  return out;
}

double parse_real(std::string_view key, std::string_view value) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(out))
    bad_value(key, value, "a real number");
  return out;
}

bool parse_flag(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "on") return true;
  if (value == "false" || value == "0" || value == "off") return false;
  bad_value(key, value, "true or false");
}

struct Field {
  TrainParams::Key key;
  std::function<void(TrainParams&, std::string_view key, std::string_view value)> set;
  std::function<std::string(const TrainParams&)> get;
};

Field size_field(std::string_view name, std::string_view help, std::size_t TrainParams::*m) {
  return {{name, help},
          [m](TrainParams& p, std::string_view k, std::string_view v) { p.*m = parse_integer<std::size_t>(k, v); },
          [m](const TrainParams& p) { return std::to_string(p.*m); }};
}

Field real_field(std::string_view name, std::string_view help, double TrainParams::*m) {
  return {{name, help},
          [m](TrainParams& p, std::string_view k, std::string_view v) { p.*m = parse_real(k, v); },
          [m](const TrainParams& p) { return format_double(p.*m); }};
}

Field flag_field(std::string_view name, std::string_view help, bool TrainParams::*m) {
  return {{name, help},
          [m](TrainParams& p, std::string_view k, std::string_view v) { p.*m = parse_flag(k, v); },
          [m](const TrainParams& p) { return std::string(p.*m ? "true" : "false"); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back({{"model", "slm, slm-forest, slm-boost, slr, slr-forest or slr-boost"},
                 [](TrainParams& p, std::string_view, std::string_view v) {
                   parse_model_spec(v);
                   p.model = std::string(v);
                 },
                 [](const TrainParams& p) { return p.model; }});
    f.push_back({{"search", "projection search: prob or apso"},
                 [](TrainParams& p, std::string_view, std::string_view v) { p.search = parse_search_mode(v); },
                 [](const TrainParams& p) { return std::string(to_string(p.search)); }});
    f.push_back(size_field("trees", "trees in a forest or boosting stages", &TrainParams::trees));
    f.push_back(flag_field("bootstrap", "bootstrap resampling for forests", &TrainParams::bootstrap));
    f.push_back(real_field("lr", "boosting learning rate in (0, 1]", &TrainParams::lr));
    f.push_back(size_field("boost-depth", "max depth of boosted trees", &TrainParams::boost_depth));
    f.push_back(size_field("max-depth", "max tree depth", &TrainParams::max_depth));
    f.push_back(size_field("min-split", "fewest samples a node needs to split", &TrainParams::min_split));
    f.push_back(size_field("min-leaf", "fewest samples on each side of a split", &TrainParams::min_leaf));
    f.push_back(real_field("purity-tol", "leaf once the majority share reaches 1 - tol", &TrainParams::purity_tol));
    f.push_back(real_field("mse-tol", "regression leaf once node MSE <= tol", &TrainParams::mse_tol));
    f.push_back(size_field("bins", "candidate thresholds per projection + 1", &TrainParams::bins));
    f.push_back(size_field("top-n", "ranked dimensions searched per node (0: min(D, 10))", &TrainParams::top_n));
    f.push_back(size_field("p", "projections sampled per node (prob)", &TrainParams::p));
    f.push_back(size_field("q", "projections kept per node (prob)", &TrainParams::q));
    f.push_back(real_field("cos-max", "max |cos| between kept projections", &TrainParams::cos_max));
    f.push_back(real_field("alpha0", "coefficient range at rank 0", &TrainParams::alpha0));
    f.push_back(real_field("alpha", "coefficient range decay", &TrainParams::alpha));
    f.push_back(real_field("beta", "selection probability decay", &TrainParams::beta));
    f.push_back(size_field("active-coeffs", "nonzero coefficients per projection (0: min(D, 8))",
                           &TrainParams::active_coeffs));
    f.push_back(size_field("population", "swarm size (apso)", &TrainParams::population));
    f.push_back(size_field("iterations", "swarm iterations per node (apso)", &TrainParams::iterations));
    f.push_back(flag_field("adaptive", "adaptive swarm coefficients (apso)", &TrainParams::adaptive));
    f.push_back({{"seed", "seed for splits, sampling and the swarm"},
                 [](TrainParams& p, std::string_view k, std::string_view v) {
                   p.seed = parse_integer<std::uint64_t>(k, v);
                 },
                 [](const TrainParams& p) { return std::to_string(p.seed); }});
    f.push_back(size_field("workers", "worker threads (0: one per physical core)", &TrainParams::workers));
    return f;
  }();
  return table;
}

const Field& find_field(std::string_view key) {
  for (const auto& f : fields())
    if (f.key.name == key) return f;
  throw Error("unknown parameter '" + std::string(key) + "'");
}

}  // namespace

ModelSpec parse_model_spec(std::string_view name) {
  ModelSpec spec;
  std::string_view base = name.substr(0, name.find('-'));
  if (base == "slm") spec.task = Task::kClassification;
  else if (base == "slr") spec.task = Task::kRegression;
  else throw Error("unknown model '" + std::string(name) + "'");
  std::string_view suffix = base.size() < name.size() ? name.substr(base.size() + 1) : "";
  if (suffix.empty()) spec.kind = ModelKind::kTree;
  else if (suffix == "forest") spec.kind = ModelKind::kForest;
  else if (suffix == "boost") spec.kind = ModelKind::kBoost;
  else throw Error("unknown model '" + std::string(name) + "'");
  return spec;
}

std::string model_spec_name(const ModelSpec& spec) {
  std::string name = spec.task == Task::kClassification ? "slm" : "slr";
  if (spec.kind == ModelKind::kForest) name += "-forest";
  if (spec.kind == ModelKind::kBoost) name += "-boost";
  return name;
}

std::span<const TrainParams::Key> TrainParams::keys() {
  static const std::vector<Key> list = [] {
    std::vector<Key> out;
    for (const auto& f : fields()) out.push_back(f.key);
    return out;
  }();
  return list;
}

bool TrainParams::has_key(std::string_view name) {
  return std::any_of(fields().begin(), fields().end(), [&](const Field& f) { return f.key.name == name; });
}

void TrainParams::set(std::string_view key, std::string_view value) { find_field(key).set(*this, key, value); }

std::string TrainParams::get(std::string_view key) const { return find_field(key).get(*this); }

TreeConfig TrainParams::tree_config() const {
  TreeConfig c;
  c.search = search;
  c.top_n = top_n;
  c.max_depth = max_depth;
  c.min_split = min_split;
  c.min_leaf = min_leaf;
  c.purity_tol = purity_tol;
  c.mse_tol = mse_tol;
  c.bins = bins;
  c.prob.alpha0 = alpha0;
  c.prob.alpha = alpha;
  c.prob.beta = beta;
  c.prob.R = active_coeffs;
  c.prob.p = p;
  c.prob.q = q;
  c.prob.cos_max = cos_max;
  c.swarm.population = population;
  c.swarm.max_iter = iterations;
  c.swarm.adaptive = adaptive;
  c.seed = seed;
  return c;
}

ForestConfig TrainParams::forest_config() const { return {trees, bootstrap}; }

BoostConfig TrainParams::boost_config() const { return {trees, lr, boost_depth}; }

Model train_model(const Dataset& ds, const TrainParams& params, WorkerPool& pool) {
  const ModelSpec spec = params.spec();
  if (spec.task != ds.task())
    throw Error("model " + params.model + " needs a " + std::string(to_string(spec.task)) + " dataset, got " +
                std::string(to_string(ds.task())));
  const TreeConfig cfg = params.tree_config();
  Model model{SlmTree{}, ds.feature_names(), ds.class_names()};
  switch (spec.kind) {
    case ModelKind::kTree: model.body = build_tree(ds, cfg, pool); break;
    case ModelKind::kForest: model.body = fit_forest(ds, cfg, params.forest_config(), pool); break;
    case ModelKind::kBoost: model.body = fit_boost(ds, cfg, params.boost_config(), pool); break;
  }
  return model;
}

Metric evaluate(const Model& model, const Dataset& ds) {
  if (ds.cols() != model.n_features())
    throw Error("model expects " + std::to_string(model.n_features()) + " features, data has " +
                std::to_string(ds.cols()));
  if (ds.task() != model.task()) throw Error("data task does not match the model");
  double total = 0.0;
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    const double pred = model.predict(ds.row(i));
    const double y = ds.targets()[i];
    total += model.task() == Task::kClassification ? (pred == y ? 1.0 : 0.0) : (pred - y) * (pred - y);
  }
  return {model.task() == Task::kClassification ? "accuracy" : "mse",
          total / static_cast<double>(ds.rows())};
}

}  // namespace slm
