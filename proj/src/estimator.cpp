#include "slm/estimator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace slm {

namespace {

std::vector<double> decode_labels(const std::vector<std::string>& names) {
  std::vector<double> out;
  for (const auto& n : names) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(n.data(), n.data() + n.size(), v);
    out.push_back(ec == std::errc() && ptr == n.data() + n.size() ? v : static_cast<double>(out.size()));
  }
  return out;
}

}  // namespace

Estimator Estimator::fit(std::span<const double> X, std::size_t n_features, std::span<const double> y,
                         const Params& params) {
  if (n_features == 0 || X.size() % n_features != 0) throw Error("X must be a full N x D matrix");
  if (X.size() / n_features != y.size())
    throw Error("X has " + std::to_string(X.size() / n_features) + " rows but y has " + std::to_string(y.size()));

  TrainParams tp;
  for (const auto& [k, v] : params) tp.set(k, v);
  const ModelSpec spec = tp.spec();

  std::vector<double> targets(y.begin(), y.end());
  std::vector<std::string> class_names;
  if (spec.task == Task::kClassification) {
    // Sorted distinct label values become class ids 0..C-1.
    std::vector<double> labels = targets;
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    for (double& t : targets)
      t = static_cast<double>(std::lower_bound(labels.begin(), labels.end(), t) - labels.begin());
    for (double l : labels) class_names.push_back(format_double(l));
  }
  std::vector<std::string> names;
  for (std::size_t d = 0; d < n_features; ++d) names.push_back("x" + std::to_string(d));
  Dataset ds(std::vector<double>(X.begin(), X.end()), n_features, std::move(targets), std::move(names), spec.task,
             std::move(class_names));

  WorkerPool pool(tp.workers == 0 ? physical_core_count() : tp.workers);
  Estimator e;
  e.model_ = std::make_shared<const Model>(train_model(ds, tp, pool));
  for (const auto& key : TrainParams::keys()) e.params_[std::string(key.name)] = tp.get(key.name);
  e.label_values_ = decode_labels(e.model_->class_names);
  return e;
}

Estimator Estimator::load(const std::filesystem::path& path) {
  Estimator e;
  e.model_ = std::make_shared<const Model>(load_model(path));
  e.label_values_ = decode_labels(e.model_->class_names);
  return e;
}

const Model& Estimator::model() const {
  if (!model_) throw Error("estimator is closed");
  return *model_;
}

std::vector<double> Estimator::predict(std::span<const double> X) const {
  const Model& m = model();
  const std::size_t d = m.n_features();
  if (X.size() % d != 0)
    throw Error("expected rows of " + std::to_string(d) + " features, got " + std::to_string(X.size()) + " values");
  std::vector<double> out;
  out.reserve(X.size() / d);
  for (std::size_t i = 0; i < X.size(); i += d) {
    double p = m.predict(X.subspan(i, d));
    if (m.task() == Task::kClassification) p = label_values_.at(static_cast<std::size_t>(p));
    out.push_back(p);
  }
  return out;
}

void Estimator::save(const std::filesystem::path& path) const { save_model(model(), path); }

void Estimator::close() { model_.reset(); }

Task Estimator::task() const { return model().task(); }

std::size_t Estimator::n_features() const { return model().n_features(); }

}  // namespace slm
