#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "slm/model_io.hpp"
#include "slm/parallel.hpp"

#ifndef SLM_DATA_DIR
#define SLM_DATA_DIR "data"
#endif

namespace slm::cli {

namespace {

constexpr std::string_view kDataKeys[] = {"dataset", "csv", "target", "data-dir", "n",
                                          "noise",   "test-fraction", "out"};

std::size_t to_size(std::string_view key, std::string_view v) {
  std::size_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw Error("invalid value '" + std::string(v) + "' for " + std::string(key) + " (expected a non-negative integer)");
  return out;
}

double to_real(std::string_view key, std::string_view v) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out))
    throw Error("invalid value '" + std::string(v) + "' for " + std::string(key) + " (expected a real number)");
  return out;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::size_t resolve_workers(std::size_t workers) { return workers == 0 ? physical_core_count() : workers; }

// String-valued CLI11 options for a set of keys; applied after parsing so the
// typed parsers (and their error messages) live in one place.
struct Bindings {
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;

  void add(CLI::App& app, std::string_view key, const std::string& help, const std::string& default_value) {
    auto& slot = values[std::string(key)];
    std::string flag = "--" + std::string(key);
    auto* opt = app.add_option(flag, slot, help);
    if (!default_value.empty()) opt->default_str(default_value);
    options[std::string(key)] = opt;
  }

  std::string config_path;

  // Config file values first, then flags given on the command line.
  template <typename Target>
  void apply(Target& target) const {
    if (!config_path.empty()) {
      if (!std::filesystem::exists(config_path)) throw Error("cannot open config file '" + config_path + "'");
      for (const auto& item : CLI::ConfigTOML().from_file(config_path)) {
        if (item.name == "++" || item.name == "--") continue;  // section markers
        if (!item.parents.empty() || !options.count(item.name))
          throw CLI::ConfigError::Extras(item.fullname());
        if (options.at(item.name)->count() > 0) continue;
        if (item.inputs.size() != 1) throw CLI::ConfigError("config key '" + item.name + "' needs one value");
        target.set(item.name, item.inputs.front());
      }
    }
    for (const auto& [key, opt] : options)
      if (opt->count() > 0) target.set(key, values.at(key));
  }
};

void add_data_options(CLI::App& app, Bindings& b, const RunConfig& defaults, bool with_out) {
  b.add(app, "dataset", "generator (circle-and-ring, moons-2, moons-4, friedman1..3) or bundled CSV name",
        defaults.dataset);
  b.add(app, "csv", "CSV file with a header row", defaults.csv);
  b.add(app, "target", "target column of --csv", defaults.target);
  b.add(app, "data-dir", "directory of bundled CSV files", defaults.data_dir);
  b.add(app, "n", "samples for generated datasets", defaults.get("n"));
  b.add(app, "noise", "noise for generated datasets", defaults.get("noise"));
  b.add(app, "test-fraction", "held-out share of the rows", defaults.get("test-fraction"));
  if (with_out) b.add(app, "out", "output path", defaults.out);
}

void add_train_options(CLI::App& app, Bindings& b, const TrainParams& defaults) {
  for (const auto& key : TrainParams::keys())
    b.add(app, key.name, std::string(key.help), defaults.get(key.name));
}

void enable_config(CLI::App& app, Bindings& b) {
  app.add_option("--config", b.config_path, "read flags from a key = value file");
}

std::string describe(const Dataset& ds) {
  std::ostringstream os;
  os << ds.rows() << " rows, " << ds.cols() << " features, ";
  if (ds.task() == Task::kClassification) os << ds.n_classes() << " classes";
  else os << "regression target";
  return os.str();
}

void print_metric(std::ostream& out, const std::string& prefix, const Metric& m) {
  out << prefix << m.name << '=' << format_double(m.value);
}

int cmd_generate(const RunConfig& cfg, std::ostream& out) {
  if (cfg.dataset.empty()) throw CLI::ValidationError("--dataset", "generate needs --dataset");
  if (!is_generator(cfg.dataset)) throw Error("unknown generator '" + cfg.dataset + "'");
  if (cfg.out.empty()) throw CLI::ValidationError("--out", "generate needs --out");
  auto ds = generate(cfg.dataset, cfg.n, cfg.noise, cfg.train.seed);
  write_csv(ds, cfg.out);
  out << "wrote " << cfg.out << ": " << describe(ds) << " (" << cfg.dataset << ", seed " << cfg.train.seed << ")\n";
  return 0;
}

struct TrainOutcome {
  Model model;
  Metric train;
  Metric test;
  double seconds = 0.0;
};

TrainOutcome train_once(const RunConfig& cfg, const TrainTest& parts, WorkerPool& pool) {
  const auto start = Clock::now();
  Model model = train_model(parts.train, cfg.train, pool);
  const double seconds = seconds_since(start);
  Metric tr = evaluate(model, parts.train);
  Metric te = evaluate(model, parts.test);
  return {std::move(model), tr, te, seconds};
}

int cmd_train(const RunConfig& cfg, std::ostream& out) {
  const ModelSpec spec = cfg.train.spec();
  Dataset ds = load_data(cfg, spec.task);
  auto parts = split(ds, {cfg.test_fraction, cfg.train.seed});
  WorkerPool pool(resolve_workers(cfg.train.workers));
  auto result = train_once(cfg, parts, pool);

  out << "model=" << cfg.train.model << " search=" << to_string(cfg.train.search) << " workers=" << pool.size()
      << " seed=" << cfg.train.seed << " train_rows=" << parts.train.rows() << " test_rows=" << parts.test.rows()
      << '\n';
  print_metric(out, "train_", result.train);
  out << ' ';
  print_metric(out, "test_", result.test);
  out << "\ntrain_seconds=" << format_double(result.seconds) << '\n';
  if (!cfg.out.empty()) {
    save_model(result.model, cfg.out);
    out << "saved " << cfg.out << '\n';
  }
  return 0;
}

int cmd_eval(const std::string& model_path, const RunConfig& cfg, const std::string& which, std::ostream& out) {
  Model model = load_model(model_path);
  Dataset ds = load_data(cfg, model.task(), model.class_names);
  if (which != "all") {
    auto parts = split(ds, {cfg.test_fraction, cfg.train.seed});
    ds = which == "train" ? parts.train : parts.test;
  }
  auto m = evaluate(model, ds);
  print_metric(out, "", m);
  out << " rows=" << ds.rows() << " split=" << which << '\n';
  return 0;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

struct BenchSpec {
  std::string datasets = "moons-2,iris";
  std::string models = "slm";
  std::string searches = "prob,apso";
  std::string workers;  // empty: 1 and the physical core count
  std::size_t repetitions = 3;
};

int cmd_bench(const RunConfig& base, const BenchSpec& bench, std::ostream& out) {
  if (bench.repetitions == 0) throw CLI::ValidationError("--repetitions", "must be at least 1");
  std::vector<std::size_t> worker_counts;
  if (bench.workers.empty()) {
    worker_counts = {1, physical_core_count()};
  } else {
    for (const auto& w : split_list(bench.workers)) worker_counts.push_back(resolve_workers(to_size("workers", w)));
  }
  worker_counts.erase(std::unique(worker_counts.begin(), worker_counts.end()), worker_counts.end());

  struct Row {
    std::string dataset, model, search;
    std::size_t workers = 1, iterations = 0;
    double median = 0.0;
    Metric metric;
  };
  std::vector<Row> rows;
  for (const auto& name : split_list(bench.datasets)) {
    for (const auto& model_name : split_list(bench.models)) {
      RunConfig cfg = base;
      cfg.dataset = name;
      cfg.csv.clear();
      cfg.train.set("model", model_name);
      const ModelSpec spec = cfg.train.spec();
      const bool generated = is_generator(name);
      if (generated && generator_task(name) != spec.task) continue;
      Dataset ds = load_data(cfg, spec.task);
      auto parts = split(ds, {cfg.test_fraction, cfg.train.seed});
      for (const auto& search : split_list(bench.searches)) {
        cfg.train.set("search", search);
        for (std::size_t w : worker_counts) {
          WorkerPool pool(w);
          std::vector<double> times;
          Metric metric;
          for (std::size_t r = 0; r < bench.repetitions; ++r) {
            auto result = train_once(cfg, parts, pool);
            times.push_back(result.seconds);
            metric = result.test;
          }
          std::sort(times.begin(), times.end());
          Row row{name, model_name, search, w,
                  cfg.train.search == SearchMode::kApso ? cfg.train.iterations : cfg.train.p,
                  times[times.size() / 2], metric};
          rows.push_back(row);
        }
      }
    }
  }

  std::ostringstream md, csv;
  md << "| dataset | model | search | workers | iterations per node | median seconds | test metric |\n"
     << "|---|---|---|---:|---:|---:|---:|\n";
  csv << "dataset,model,search,workers,iterations,median_seconds,metric,value\n";
  for (const auto& r : rows) {
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.4f", r.median);
    char val[32];
    std::snprintf(val, sizeof val, "%.4f", r.metric.value);
    md << "| " << r.dataset << " | " << r.model << " | " << r.search << " | " << r.workers << " | " << r.iterations
       << " | " << secs << " | " << r.metric.name << ' ' << val << " |\n";
    csv << r.dataset << ',' << r.model << ',' << r.search << ',' << r.workers << ',' << r.iterations << ','
        << format_double(r.median) << ',' << r.metric.name << ',' << format_double(r.metric.value) << '\n';
  }
  out << md.str();
  if (!base.out.empty()) {
    std::ofstream(base.out + ".md") << md.str();
    std::ofstream(base.out + ".csv") << csv.str();
    if (!std::filesystem::exists(base.out + ".csv")) throw Error("cannot write report '" + base.out + ".csv'");
    out << "wrote " << base.out << ".md and " << base.out << ".csv\n";
  }
  return 0;
}

}  // namespace

RunConfig::RunConfig() : data_dir(SLM_DATA_DIR) {}

std::span<const std::string_view> RunConfig::data_keys() { return kDataKeys; }

void RunConfig::set(std::string_view key, std::string_view value) {
  if (key == "dataset") dataset = value;
  else if (key == "csv") csv = value;
  else if (key == "target") target = value;
  else if (key == "data-dir") data_dir = value;
  else if (key == "n") n = to_size(key, value);
  else if (key == "noise") noise = to_real(key, value);
  else if (key == "test-fraction") test_fraction = to_real(key, value);
  else if (key == "out") out = value;
  else train.set(key, value);
}

std::string RunConfig::get(std::string_view key) const {
  if (key == "dataset") return dataset;
  if (key == "csv") return csv;
  if (key == "target") return target;
  if (key == "data-dir") return data_dir;
  if (key == "n") return std::to_string(n);
  if (key == "noise") return format_double(noise);
  if (key == "test-fraction") return format_double(test_fraction);
  if (key == "out") return out;
  return train.get(key);
}

bool RunConfig::operator==(const RunConfig& other) const {
  for (auto key : data_keys())
    if (get(key) != other.get(key)) return false;
  for (const auto& key : TrainParams::keys())
    if (get(key.name) != other.get(key.name)) return false;
  return true;
}

std::string to_config_text(const RunConfig& cfg) {
  std::ostringstream os;
  auto emit = [&](std::string_view key, bool text) {
    os << key << " = " << (text ? quoted(cfg.get(key)) : cfg.get(key)) << '\n';
  };
  for (auto key : RunConfig::data_keys())
    emit(key, key != "n" && key != "noise" && key != "test-fraction");
  for (const auto& key : TrainParams::keys()) emit(key.name, key.name == "model" || key.name == "search");
  return os.str();
}

Dataset load_data(const RunConfig& cfg, Task task, std::span<const std::string> class_names) {
  if (!cfg.csv.empty() && !cfg.dataset.empty()) throw CLI::ValidationError("give either --dataset or --csv, not both");
  if (!cfg.csv.empty()) return load_csv(cfg.csv, cfg.target, task, class_names);
  if (cfg.dataset.empty()) throw CLI::ValidationError("a data source is required (--dataset or --csv)");
  if (is_generator(cfg.dataset)) {
    if (generator_task(cfg.dataset) != task)
      throw Error("dataset '" + cfg.dataset + "' is a " + std::string(to_string(generator_task(cfg.dataset))) +
                  " dataset");
    return generate(cfg.dataset, cfg.n, cfg.noise, cfg.train.seed);
  }
  const auto path = std::filesystem::path(cfg.data_dir) / (cfg.dataset + ".csv");
  if (!std::filesystem::exists(path))
    throw Error("unknown dataset '" + cfg.dataset + "': not a generator and " + path.string() + " does not exist");
  return load_csv(path, "target", task, class_names);
}

RunConfig parse_train_args(const std::vector<std::string>& args) {
  RunConfig cfg;
  CLI::App app("train");
  Bindings b;
  add_data_options(app, b, cfg, true);
  add_train_options(app, b, cfg.train);
  enable_config(app, b);
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  app.parse(reversed);
  b.apply(cfg);
  return cfg;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Subspace learning machine: oblique trees, forests and boosting", "slm");
  app.require_subcommand(1);
  app.fallthrough(false);

  RunConfig gen_cfg, train_cfg, eval_cfg, bench_cfg;
  Bindings gen_b, train_b, eval_b, bench_b;

  auto* gen = app.add_subcommand("generate", "write a synthetic dataset as CSV");
  gen_b.add(*gen, "dataset", "generator name", "");
  gen_b.add(*gen, "n", "number of samples", gen_cfg.get("n"));
  gen_b.add(*gen, "noise", "noise level", gen_cfg.get("noise"));
  gen_b.add(*gen, "seed", "random seed", "0");
  gen_b.add(*gen, "out", "CSV path to write", "");
  enable_config(*gen, gen_b);

  auto* train = app.add_subcommand("train", "train a model and report train/test metrics");
  add_data_options(*train, train_b, train_cfg, true);
  add_train_options(*train, train_b, train_cfg.train);
  enable_config(*train, train_b);

  auto* eval = app.add_subcommand("eval", "score a saved model on a dataset");
  std::string model_path;
  std::string which = "all";
  eval->add_option("model", model_path, "model file written by train")->required();
  add_data_options(*eval, eval_b, eval_cfg, false);
  eval_b.add(*eval, "seed", "seed of the train/test split", "0");
  eval->add_option("--split", which, "rows to score")->check(CLI::IsMember({"all", "train", "test"}))->default_str("all");
  enable_config(*eval, eval_b);

  auto* bench = app.add_subcommand("bench", "time training over datasets x models x search x workers");
  BenchSpec spec;
  add_data_options(*bench, bench_b, bench_cfg, true);
  add_train_options(*bench, bench_b, bench_cfg.train);
  bench->add_option("--datasets", spec.datasets, "comma-separated dataset names")->capture_default_str();
  bench->add_option("--models", spec.models, "comma-separated model names")->capture_default_str();
  bench->add_option("--searches", spec.searches, "comma-separated search modes")->capture_default_str();
  bench->add_option("--workers-list", spec.workers, "comma-separated worker counts (default: 1 and all cores)");
  bench->add_option("--repetitions", spec.repetitions, "timed runs per cell; the median is reported")
      ->capture_default_str();
  enable_config(*bench, bench_b);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help(app.get_subcommands().empty() ? "" : app.get_subcommands().front()->get_name());
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (gen->parsed()) {
      gen_b.apply(gen_cfg);
      return cmd_generate(gen_cfg, out);
    }
    if (train->parsed()) {
      train_b.apply(train_cfg);
      return cmd_train(train_cfg, out);
    }
    if (eval->parsed()) {
      eval_b.apply(eval_cfg);
      return cmd_eval(model_path, eval_cfg, which, out);
    }
    bench_b.apply(bench_cfg);
    return cmd_bench(bench_cfg, spec, out);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    // Bad flag values surface from the typed parsers as library errors.
    const std::string what = e.what();
    err << "error: " << what << '\n';
    return what.rfind("invalid value", 0) == 0 || what.rfind("unknown parameter", 0) == 0 ||
                   what.rfind("unknown model", 0) == 0 || what.rfind("unknown search mode", 0) == 0
               ? 2
               : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace slm::cli
