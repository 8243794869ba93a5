#include <doctest.h>

#include <fstream>

#include "slm/model_io.hpp"
#include "test_util.hpp"

using namespace slm;

namespace {

TreeConfig quick() {
  TreeConfig cfg;
  cfg.prob.p = 48;
  cfg.swarm.max_iter = 15;
  cfg.seed = 3;
  return cfg;
}

std::vector<Model> sample_models() {
  auto cls = generate("moons-4", 160, 0.2, 1);
  auto reg = generate("friedman1", 160, 0.5, 1);
  auto prob = quick();
  prob.search = SearchMode::kProbabilistic;
  prob.prob.q = 2;
  std::vector<Model> out;
  out.push_back({build_tree(cls, quick()), cls.feature_names(), cls.class_names()});
  out.push_back({build_tree(reg, prob), reg.feature_names(), {}});
  out.push_back({fit_forest(cls, prob, ForestConfig{3, true}), cls.feature_names(), cls.class_names()});
  out.push_back({fit_boost(reg, quick(), BoostConfig{3, 0.1, 3}), reg.feature_names(), {}});
  auto bin = generate("moons-2", 100, 0.2, 2);
  out.push_back({fit_boost(bin, quick(), BoostConfig{3, 0.1, 3}), bin.feature_names(), bin.class_names()});
  return out;
}

}  // namespace

TEST_CASE("serialization round trip is byte-stable and prediction-exact") {
  Rng rng(4);
  std::uniform_real_distribution<double> u(-1.0, 3.0);
  for (const auto& model : sample_models()) {
    const std::string text = serialize_model(model);
    CHECK(text.back() == '\n');
    Model back = deserialize_model(text);
    CHECK(serialize_model(back) == text);
    CHECK(back.kind() == model.kind());
    CHECK(back.task() == model.task());
    CHECK(back.feature_names == model.feature_names);
    CHECK(back.class_names == model.class_names);
    for (int i = 0; i < 200; ++i) {
      std::vector<double> x(model.n_features());
      for (auto& v : x) v = u(rng);
      CHECK(back.predict(x) == model.predict(x));
    }
  }
}

TEST_CASE("model header fields") {
  auto models = sample_models();
  auto j = model_to_json(models[2]);
  CHECK(j["format"] == "slm-model");
  CHECK(j["version"] == kModelFormatVersion);
  CHECK(j["kind"] == "forest");
  CHECK(j["task"] == "classification");
  CHECK(j["n_features"] == 2);
  CHECK(j["forest"]["trees"].size() == 3);
  CHECK(model_to_json(models[0])["tree"]["config"]["search"] == "apso");
}

TEST_CASE("tree config round trip") {
  TreeConfig c;
  c.search = SearchMode::kProbabilistic;
  c.top_n = 4;
  c.max_depth = 7;
  c.purity_tol = 0.125;
  c.prob.alpha0 = 3.5;
  c.prob.q = 2;
  c.swarm.population = 11;
  c.swarm.adaptive = false;
  c.seed = 0xFFFFFFFFFFFFFFFFull;
  auto back = tree_config_from_json(tree_config_to_json(c));
  CHECK(tree_config_to_json(back).dump() == tree_config_to_json(c).dump());
  CHECK(back.seed == c.seed);
}

TEST_CASE("file round trip and errors") {
  test::TempDir dir("model");
  auto model = sample_models()[0];
  save_model(model, dir / "m.json");
  CHECK(serialize_model(load_model(dir / "m.json")) == serialize_model(model));
  CHECK_THROWS_AS(load_model(dir / "missing.json"), Error);
  CHECK_THROWS_AS(save_model(model, dir / "no" / "such" / "dir.json"), Error);
}

TEST_CASE("corrupted model files are rejected") {
  auto model = sample_models()[0];
  const Json good = model_to_json(model);

  CHECK_THROWS_WITH_AS(deserialize_model("{not json"), doctest::Contains("not valid JSON"), Error);
  CHECK_THROWS_AS(deserialize_model("[]"), Error);

  auto bad = good;
  bad["format"] = "other";
  CHECK_THROWS_AS(model_from_json(bad), Error);

  bad = good;
  bad["version"] = 99;
  CHECK_THROWS_WITH_AS(model_from_json(bad), doctest::Contains("version"), Error);

  bad = good;
  bad["kind"] = "svm";
  CHECK_THROWS_AS(model_from_json(bad), Error);

  bad = good;
  bad["tree"]["root"].erase("value");
  CHECK_THROWS_WITH_AS(model_from_json(bad), doctest::Contains("value"), Error);

  bad = good;
  bad["tree"]["root"]["planes"][0]["dims"][0] = 5;
  CHECK_THROWS_AS(model_from_json(bad), Error);

  bad = good;
  bad["tree"]["root"]["children"].erase(0);
  CHECK_THROWS_AS(model_from_json(bad), Error);

  bad = good;
  bad["n_features"] = 3;
  CHECK_THROWS_AS(model_from_json(bad), Error);

  bad = good;
  bad["tree"]["root"]["value"] = Json::array({1.0});
  CHECK_THROWS_AS(model_from_json(bad), Error);

  const std::string text = serialize_model(model);
  CHECK_THROWS_AS(deserialize_model(text.substr(0, text.size() / 2)), Error);
}
