#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace slm {

// Engine behind every stochastic step; seeded explicitly everywhere.
using Rng = std::mt19937_64;

// SplitMix64 finalizer over (base, stream): independent child seeds for
// nodes, trees and bootstrap draws without sharing one engine.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Shortest text that parses back to the same double.
inline std::string format_double(double v) {
  std::array<char, 32> buf;
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

enum class Task { kClassification, kRegression };

// Base of every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string_view to_string(Task task) {
  return task == Task::kClassification ? "classification" : "regression";
}

inline Task parse_task(std::string_view text) {
  if (text == "classification") return Task::kClassification;
  if (text == "regression") return Task::kRegression;
  throw Error("unknown task '" + std::string(text) + "'");
}

}  // namespace slm
