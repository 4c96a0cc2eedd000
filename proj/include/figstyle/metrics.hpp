#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace figstyle::harness {

struct ClassStats {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct EvalReport {
  double weighted_f1 = 0.0;
  std::vector<ClassStats> per_class;  // sorted by label; only classes seen in gold or pred
  std::vector<std::string> labels;    // confusion-matrix axis order (= per_class order)
  std::vector<std::vector<std::size_t>> confusion;  // [gold][pred]
  double runtime_seconds = 0.0;
  nlohmann::json config = nlohmann::json::object();
};

// Per-class F1 averaged with gold-support weights. Classes absent from gold carry
// zero weight; a class with no predictions (or no hits) scores 0.
double weighted_f1(std::span<const std::string> gold, std::span<const std::string> pred);

EvalReport evaluate(std::span<const std::string> gold, std::span<const std::string> pred);

// Runtime is excluded unless requested so that reports stay byte-identical across runs.
nlohmann::json to_json(const EvalReport& report, bool include_runtime = false);

}  // namespace figstyle::harness
