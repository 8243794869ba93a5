#include "slm/dataset.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <unordered_map>

namespace slm {

namespace {

constexpr std::array<std::string_view, 6> kGenerators = {
    "circle-and-ring", "moons-2", "moons-4", "friedman1", "friedman2", "friedman3"};

std::vector<std::string> numbered_names(std::string_view prefix, std::size_t n) {
  std::vector<std::string> names;
  names.reserve(n);
  for (std::size_t i = 0; i < n; ++i) names.push_back(std::string(prefix) + std::to_string(i));
  return names;
}

// Per-class counts for a balanced generator; the remainder goes to the first classes.
std::vector<std::size_t> balanced_counts(std::size_t n, std::size_t classes) {
  std::vector<std::size_t> counts(classes, n / classes);
  for (std::size_t c = 0; c < n % classes; ++c) ++counts[c];
  return counts;
}

struct Builder {
  std::vector<double> x;
  std::vector<double> y;
  void add(double a, double b, double target) {
    x.push_back(a);
    x.push_back(b);
    y.push_back(target);
  }
};

// Half-circle arcs as in the classic two-moons construction.
void add_moons(Builder& out, std::size_t n_outer, std::size_t n_inner, double noise,
               double y_offset, int outer_label, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto jitter = [&] { return noise > 0.0 ? noise * gauss(rng) : 0.0; };
  auto angle = [](std::size_t i, std::size_t n) {
    return n > 1 ? std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
  };
  for (std::size_t i = 0; i < n_outer; ++i) {
    double t = angle(i, n_outer);
    double a = std::cos(t) + jitter();
    double b = std::sin(t) + y_offset + jitter();
    out.add(a, b, outer_label);
  }
  for (std::size_t i = 0; i < n_inner; ++i) {
    double t = angle(i, n_inner);
    double a = 1.0 - std::cos(t) + jitter();
    double b = 0.5 - std::sin(t) + y_offset + jitter();
    out.add(a, b, outer_label + 1);
  }
}

Dataset circle_and_ring(std::size_t n, double noise, std::mt19937_64& rng) {
  auto counts = balanced_counts(n, 2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Builder b;
  for (int cls = 0; cls < 2; ++cls) {
    for (std::size_t i = 0; i < counts[cls]; ++i) {
      double u = unit(rng);
      double theta = 2.0 * std::numbers::pi * unit(rng);
      // Area-uniform radius: disc of radius 0.5, annulus [0.8, 1.0].
      double r = cls == 0 ? 0.5 * std::sqrt(u) : std::sqrt(0.64 + u * (1.0 - 0.64));
      double px = r * std::cos(theta);
      double py = r * std::sin(theta);
      if (noise > 0.0) {
        px += noise * gauss(rng);
        py += noise * gauss(rng);
      }
      b.add(px, py, cls);
    }
  }
  return Dataset(std::move(b.x), 2, std::move(b.y), {"x0", "x1"}, Task::kClassification,
                 {"0", "1"});
}

Dataset friedman(int variant, std::size_t n, double noise, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::size_t d = variant == 1 ? 10 : 4;
  std::vector<double> x(n * d);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double* row = x.data() + i * d;
    for (std::size_t j = 0; j < d; ++j) row[j] = unit(rng);
    if (variant != 1) {
      row[0] *= 100.0;
      row[1] = 40.0 * std::numbers::pi + row[1] * 520.0 * std::numbers::pi;
      row[3] = 1.0 + row[3] * 10.0;
    }
    double target = 0.0;
    if (variant == 1) {
      target = 10.0 * std::sin(std::numbers::pi * row[0] * row[1]) +
               20.0 * (row[2] - 0.5) * (row[2] - 0.5) + 10.0 * row[3] + 5.0 * row[4];
    } else {
      double inner = row[1] * row[2] - 1.0 / (row[1] * row[3]);
      target = variant == 2 ? std::sqrt(row[0] * row[0] + inner * inner)
                            : std::atan(inner / row[0]);
    }
    y[i] = target + (noise > 0.0 ? noise * gauss(rng) : 0.0);
  }
  return Dataset(std::move(x), d, std::move(y), numbered_names("x", d), Task::kRegression);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_double(std::string_view text, double& value) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && ptr == text.data() + text.size() && std::isfinite(value);
}

}  // namespace

Dataset::Dataset(std::vector<double> features, std::size_t n_features,
                 std::vector<double> targets, std::vector<std::string> feature_names,
                 Task task, std::vector<std::string> class_names)
    : n_features_(n_features),
      feature_names_(std::move(feature_names)),
      class_names_(std::move(class_names)),
      task_(task) {
  const std::size_t n = targets.size();
  if (n == 0 || n_features == 0) throw Error("dataset must have at least one row and one column");
  if (features.size() != n * n_features)
    throw Error("feature matrix size does not match rows x columns");
  for (double v : features)
    if (!std::isfinite(v)) throw Error("dataset contains a non-finite feature value");
  if (feature_names_.empty()) feature_names_ = numbered_names("x", n_features);
  if (feature_names_.size() != n_features) throw Error("feature_names length must equal D");

  if (task == Task::kClassification) {
    int max_label = -1;
    for (double t : targets) {
      if (t < 0 || t != std::floor(t)) throw Error("class labels must be non-negative integers");
      max_label = std::max(max_label, static_cast<int>(t));
    }
    if (class_names_.empty()) class_names_ = numbered_names("", static_cast<std::size_t>(max_label) + 1);
    if (static_cast<std::size_t>(max_label) >= class_names_.size())
      throw Error("class label outside the class-name table");
  } else {
    class_names_.clear();
    for (double t : targets)
      if (!std::isfinite(t)) throw Error("dataset contains a non-finite target");
  }
  features_ = std::make_shared<const std::vector<double>>(std::move(features));
  targets_ = std::make_shared<const std::vector<double>>(std::move(targets));
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  std::vector<double> x;
  std::vector<double> y;
  x.reserve(rows.size() * n_features_);
  y.reserve(rows.size());
  for (std::size_t r : rows) {
    if (r >= this->rows()) throw Error("row index out of range");
    auto src = row(r);
    x.insert(x.end(), src.begin(), src.end());
    y.push_back((*targets_)[r]);
  }
  return Dataset(std::move(x), n_features_, std::move(y), feature_names_, task_, class_names_);
}

Dataset Dataset::with_targets(std::vector<double> targets, Task task) const {
  if (targets.size() != rows()) throw Error("target length must equal N");
  Dataset out = *this;
  out.task_ = task;
  if (task == Task::kRegression) {
    out.class_names_.clear();
    for (double t : targets)
      if (!std::isfinite(t)) throw Error("dataset contains a non-finite target");
  }
  out.targets_ = std::make_shared<const std::vector<double>>(std::move(targets));
  return out;
}

std::span<const std::string_view> generator_names() { return kGenerators; }

bool is_generator(std::string_view name) {
  return std::find(kGenerators.begin(), kGenerators.end(), name) != kGenerators.end();
}

Task generator_task(std::string_view name) {
  if (!is_generator(name)) throw Error("unknown dataset generator '" + std::string(name) + "'");
  return name.starts_with("friedman") ? Task::kRegression : Task::kClassification;
}

Dataset generate(std::string_view name, std::size_t n_samples, double noise, std::uint64_t seed) {
  if (!is_generator(name)) throw Error("unknown dataset generator '" + std::string(name) + "'");
  if (n_samples < 10) throw Error("n_samples must be at least 10");
  if (!(noise >= 0.0) || !std::isfinite(noise)) throw Error("noise must be finite and non-negative");
  std::mt19937_64 rng(seed);

  if (name == "circle-and-ring") return circle_and_ring(n_samples, noise, rng);
  if (name == "friedman1") return friedman(1, n_samples, noise, rng);
  if (name == "friedman2") return friedman(2, n_samples, noise, rng);
  if (name == "friedman3") return friedman(3, n_samples, noise, rng);

  Builder b;
  if (name == "moons-2") {
    auto counts = balanced_counts(n_samples, 2);
    add_moons(b, counts[0], counts[1], noise, 0.0, 0, rng);
    return Dataset(std::move(b.x), 2, std::move(b.y), {"x0", "x1"}, Task::kClassification,
                   {"0", "1"});
  }
  // moons-4: a second moon pair stacked 2.0 above the first.
  auto counts = balanced_counts(n_samples, 4);
  add_moons(b, counts[0], counts[1], noise, 0.0, 0, rng);
  add_moons(b, counts[2], counts[3], noise, 2.0, 2, rng);
  return Dataset(std::move(b.x), 2, std::move(b.y), {"x0", "x1"}, Task::kClassification,
                 {"0", "1", "2", "3"});
}

Dataset load_csv(const std::filesystem::path& path, std::string_view target_column, Task task,
                 std::span<const std::string> class_names) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");

  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) {
      have_header = true;
      break;
    }
  }
  if (!have_header) throw Error("empty file '" + path.string() + "'");
  if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);

  std::vector<std::string> header;
  for (auto f : split_fields(line)) header.emplace_back(f);
  auto target_it = std::find(header.begin(), header.end(), target_column);
  if (target_it == header.end())
    throw Error("missing column '" + std::string(target_column) + "' in '" + path.string() + "'");
  const std::size_t target_idx = static_cast<std::size_t>(target_it - header.begin());
  if (header.size() < 2) throw Error("need at least one feature column besides the target");

  std::vector<std::string> feature_names;
  for (std::size_t j = 0; j < header.size(); ++j)
    if (j != target_idx) feature_names.push_back(header[j]);

  std::vector<std::string> classes(class_names.begin(), class_names.end());
  const bool fixed_classes = !classes.empty();
  std::unordered_map<std::string, std::size_t> class_ids;
  for (std::size_t c = 0; c < classes.size(); ++c) class_ids.emplace(classes[c], c);

  std::vector<double> x;
  std::vector<double> y;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (fields.size() != header.size())
      throw Error(path.string() + ":" + std::to_string(line_no) + ": expected " +
                  std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (j == target_idx) continue;
      double v = 0.0;
      if (!parse_double(fields[j], v))
        throw Error(path.string() + ":" + std::to_string(line_no) + ": non-numeric value '" +
                    std::string(fields[j]) + "' in column '" + header[j] + "'");
      x.push_back(v);
    }
    std::string_view t = fields[target_idx];
    if (task == Task::kRegression) {
      double v = 0.0;
      if (!parse_double(t, v))
        throw Error(path.string() + ":" + std::to_string(line_no) + ": non-numeric target '" +
                    std::string(t) + "'");
      y.push_back(v);
    } else {
      auto it = class_ids.find(std::string(t));
      if (it == class_ids.end()) {
        if (fixed_classes)
          throw Error(path.string() + ":" + std::to_string(line_no) + ": unknown class label '" +
                      std::string(t) + "'");
        it = class_ids.emplace(std::string(t), classes.size()).first;
        classes.emplace_back(t);
      }
      y.push_back(static_cast<double>(it->second));
    }
  }
  if (y.empty()) throw Error("no data rows in '" + path.string() + "'");
  const std::size_t d = feature_names.size();
  return Dataset(std::move(x), d, std::move(y), std::move(feature_names), task,
                 task == Task::kClassification ? std::move(classes) : std::vector<std::string>{});
}

void write_csv(const Dataset& ds, const std::filesystem::path& path, std::string_view target_column) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  for (const auto& name : ds.feature_names()) out << name << ',';
  out << target_column << '\n';
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    for (double v : ds.row(i)) out << format_double(v) << ',';
    if (ds.task() == Task::kClassification)
      out << ds.class_names()[static_cast<std::size_t>(ds.label(i))];
    else
      out << format_double(ds.targets()[i]);
    out << '\n';
  }
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

SplitIndices split_indices(const Dataset& ds, const SplitSpec& spec) {
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0))
    throw Error("test_fraction must lie in (0, 1)");
  std::mt19937_64 rng(spec.seed);
  std::vector<std::vector<std::size_t>> strata;
  if (ds.task() == Task::kClassification) {
    strata.resize(ds.n_classes());
    for (std::size_t i = 0; i < ds.rows(); ++i) strata[static_cast<std::size_t>(ds.label(i))].push_back(i);
  } else {
    strata.emplace_back(ds.rows());
    for (std::size_t i = 0; i < ds.rows(); ++i) strata[0][i] = i;
  }

  SplitIndices out;
  for (auto& stratum : strata) {
    std::shuffle(stratum.begin(), stratum.end(), rng);
    auto n_test = static_cast<std::size_t>(
        std::llround(spec.test_fraction * static_cast<double>(stratum.size())));
    out.test.insert(out.test.end(), stratum.begin(), stratum.begin() + static_cast<std::ptrdiff_t>(n_test));
    out.train.insert(out.train.end(), stratum.begin() + static_cast<std::ptrdiff_t>(n_test), stratum.end());
  }
  if (out.train.empty() || out.test.empty())
    throw Error("test_fraction " + format_double(spec.test_fraction) + " leaves an empty partition for N=" +
                std::to_string(ds.rows()));
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

TrainTest split(const Dataset& ds, const SplitSpec& spec) {
  auto idx = split_indices(ds, spec);
  return {ds.subset(idx.train), ds.subset(idx.test)};
}

}  // namespace slm
