#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "figstyle/corpus.hpp"

// Figurative-language dataset construction: balanced binary sets, consistency
// filtering against human labels, and per-feature threshold calibration.
namespace figstyle::flpipe {

using corpus::Example;
using corpus::Feature;
using corpus::LabelAssertions;

// Counts for one binary training set. n_pos is the positive-class size N;
// n_neg <= floor(N/2) and n_pos + n_neg + n_lit == 2N.
struct BinarySetPlan {
  Feature feature = Feature::metaphor;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  std::size_t n_lit = 0;
  std::uint64_t seed = 0;
};

nlohmann::json to_json(const BinarySetPlan& plan);

struct BinarySet {
  BinarySetPlan plan;
  // Positives, then sampled negatives, then sampled literals relabeled not_<feature>.
  // Each record carries only the binary task's assertion.
  std::vector<Example> examples;
};

// Pure count arithmetic for P positives and Q explicit negatives.
BinarySetPlan plan_binary_set(Feature feature, std::size_t positives, std::size_t negatives,
                              std::uint64_t seed);

BinarySet build_binary_training_set(Feature feature, std::span<const Example> task_pool,
                                    std::span<const Example> literal_pool, std::uint64_t seed);

struct Pools {
  std::vector<Example> task;     // explicit positive or negative assertion for the feature
  std::vector<Example> literal;  // literal examples not in the task pool
};
Pools select_pools(std::span<const Example> collection, Feature feature);

// A full six-feature positive/negative assignment.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::array<bool, corpus::kFeatureCount> positive) : positive_(positive) {}

  bool operator[](Feature f) const { return positive_[corpus::index(f)]; }
  void set(Feature f, bool positive) { positive_[corpus::index(f)] = positive; }
  const std::array<bool, corpus::kFeatureCount>& flags() const { return positive_; }
  // Positive feature names in canonical order.
  std::vector<std::string> positive_names() const;
  LabelAssertions to_assertions() const;

  bool operator==(const Assignment&) const = default;

 private:
  std::array<bool, corpus::kFeatureCount> positive_{};
};

// Accepts unless some feature is asserted by the human labels (literal expands to
// all-negative) with the opposite polarity of the prediction.
bool filter_consistent(const LabelAssertions& human, const Assignment& predicted);

struct ProbRecord {
  std::string id;
  std::array<double, corpus::kFeatureCount> probs{};

  double operator[](Feature f) const { return probs[corpus::index(f)]; }
};

// Validates finiteness, range, and that exactly the six features are present.
ProbRecord parse_prob_record(const nlohmann::json& record);
nlohmann::json to_json(const ProbRecord& rec);
std::vector<ProbRecord> load_predictions(const std::filesystem::path& path);

enum class CalibrationSource { human, binary };
std::string_view name(CalibrationSource s);
CalibrationSource calibration_source_from_name(std::string_view s);

struct ThresholdSet {
  std::array<double, corpus::kFeatureCount> thresholds{};
  CalibrationSource source = CalibrationSource::human;

  double operator[](Feature f) const { return thresholds[corpus::index(f)]; }
};

nlohmann::json to_json(const ThresholdSet& t);
ThresholdSet thresholds_from_json(const nlohmann::json& j);

// Positive iff p >= t, per feature.
Assignment apply_thresholds(const ProbRecord& probs, const ThresholdSet& thresholds);
// Producer-side convention for binary-model outputs.
Assignment threshold_at_half(const ProbRecord& probs);

struct MultilabelResult {
  std::vector<Example> accepted;  // labels replaced by the full predicted assignment
  std::size_t kept = 0;
  std::size_t discarded = 0;
};

MultilabelResult build_multilabel_corpus(std::span<const Example> examples,
                                         std::span<const ProbRecord> predictions);

// The threshold grid {0.00, 0.01, ..., 1.00}.
inline constexpr int kGridSteps = 100;
inline double grid_threshold(int k) { return static_cast<double>(k) / kGridSteps; }

struct FeatureCalibration {
  double threshold = 0.0;
  double f1 = 0.0;
  std::size_t labelled = 0;
  std::array<double, kGridSteps + 1> curve{};  // weighted F1 at every grid point
};

struct CalibrationResult {
  ThresholdSet thresholds;
  std::array<FeatureCalibration, corpus::kFeatureCount> per_feature{};
};

// Per feature, picks the grid threshold maximizing weighted F1 over {positive,
// negative}; ties go to the smallest threshold. Unknown reference assertions are
// skipped for source=human; source=binary requires every feature asserted.
CalibrationResult calibrate_thresholds(std::span<const ProbRecord> dev,
                                       const std::map<std::string, LabelAssertions>& reference,
                                       CalibrationSource source);

// Gold for a binary task: positive iff the task feature is asserted positive.
bool project_gold_for_binary_task(const LabelAssertions& labels, Feature task);

}  // namespace figstyle::flpipe
