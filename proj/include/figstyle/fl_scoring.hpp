#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>

#include <json.hpp>

#include "figstyle/flpipe.hpp"
#include "figstyle/metrics.hpp"

namespace figstyle::harness {

enum class FlScoringMode { multilabel, per_task };
std::string_view name(FlScoringMode m);
FlScoringMode fl_scoring_mode_from_name(std::string_view s);

struct FlFeatureScore {
  std::size_t scored = 0;          // examples contributing to this feature
  std::optional<EvalReport> report;  // absent when nothing could be scored
};

struct FlScoreReport {
  FlScoringMode mode = FlScoringMode::multilabel;
  std::array<FlFeatureScore, corpus::kFeatureCount> per_feature{};
  double macro_f1 = 0.0;  // mean weighted F1 over scored features
};

// multilabel: each feature is scored on the examples whose gold asserts it
//   (literal counts as negative); unknown assertions are skipped.
// per_task: each feature is scored on every example from a dataset that asserts
//   the feature somewhere, with gold projected via project_gold_for_binary_task.
// Classes are the strings "positive" and "negative".
FlScoreReport score_fl_predictions(std::span<const corpus::Example> test,
                                   const std::map<std::string, flpipe::Assignment>& predictions,
                                   FlScoringMode mode);

nlohmann::json to_json(const FlScoreReport& r);

}  // namespace figstyle::harness
