#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "slm/dataset.hpp"
#include "slm/train.hpp"

namespace slm::cli {

// Everything `train` needs: where the data comes from, how it is split, the
// training parameters and where the model goes. Config files hold the same
// keys as the flags.
struct RunConfig {
  TrainParams train;
  std::string dataset;
  std::string csv;
  std::string target = "target";
  std::string data_dir;
  std::size_t n = 1000;
  double noise = 0.1;
  double test_fraction = 0.2;
  std::string out;

  RunConfig();

  // Keys outside TrainParams.
  static std::span<const std::string_view> data_keys();
  void set(std::string_view key, std::string_view value);
  std::string get(std::string_view key) const;
  bool operator==(const RunConfig& other) const;
};

// `key = value` lines, one per key, loadable with --config.
std::string to_config_text(const RunConfig& cfg);

// Generator name, bundled benchmark name (data_dir/<name>.csv) or --csv path.
// Classification files are encoded with `class_names` when given.
Dataset load_data(const RunConfig& cfg, Task task, std::span<const std::string> class_names = {});

// Runs one command line (without the program name). Returns the exit code:
// 0 success, 1 runtime error, 2 bad usage.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Parses `train` flags into a RunConfig without running anything.
RunConfig parse_train_args(const std::vector<std::string>& args);

}  // namespace slm::cli
