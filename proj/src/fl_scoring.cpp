#include "figstyle/fl_scoring.hpp"

#include <set>

#include "figstyle/error.hpp"

namespace figstyle::harness {

using corpus::Assertion;
using corpus::Feature;

std::string_view name(FlScoringMode m) {
  return m == FlScoringMode::multilabel ? "multilabel" : "per-task";
}

FlScoringMode fl_scoring_mode_from_name(std::string_view s) {
  if (s == "multilabel") return FlScoringMode::multilabel;
  if (s == "per-task") return FlScoringMode::per_task;
  throw ConfigError("scoring mode must be multilabel or per-task, got \"" + std::string(s) + "\"");
}

FlScoreReport score_fl_predictions(std::span<const corpus::Example> test,
                                   const std::map<std::string, flpipe::Assignment>& predictions,
                                   FlScoringMode mode) {
  std::vector<const flpipe::Assignment*> pred;
  pred.reserve(test.size());
  for (const auto& ex : test) {
    auto it = predictions.find(ex.id);
    if (it == predictions.end()) throw DataError("missing prediction for \"" + ex.id + "\"");
    pred.push_back(&it->second);
  }

  FlScoreReport out;
  out.mode = mode;
  double macro = 0.0;
  std::size_t scored_features = 0;
  for (Feature f : corpus::kFeatures) {
    std::set<std::string> task_datasets;
    if (mode == FlScoringMode::per_task) {
      for (const auto& ex : test) {
        if (ex.labels.get(f) != Assertion::unknown) task_datasets.insert(ex.dataset);
      }
    }
    std::vector<std::string> gold;
    std::vector<std::string> guess;
    for (std::size_t i = 0; i < test.size(); ++i) {
      const auto& ex = test[i];
      bool positive = false;
      if (mode == FlScoringMode::multilabel) {
        const Assertion a = ex.labels.effective(f);
        if (a == Assertion::unknown) continue;
        positive = a == Assertion::positive;
      } else {
        if (!task_datasets.contains(ex.dataset)) continue;
        positive = flpipe::project_gold_for_binary_task(ex.labels, f);
      }
      gold.emplace_back(positive ? "positive" : "negative");
      guess.emplace_back((*pred[i])[f] ? "positive" : "negative");
    }
    FlFeatureScore& fs = out.per_feature[corpus::index(f)];
    fs.scored = gold.size();
    if (!gold.empty()) {
      fs.report = evaluate(gold, guess);
      macro += fs.report->weighted_f1;
      ++scored_features;
    }
  }
  out.macro_f1 = scored_features ? macro / static_cast<double>(scored_features) : 0.0;
  return out;
}

nlohmann::json to_json(const FlScoreReport& r) {
  nlohmann::json features = nlohmann::json::object();
  for (Feature f : corpus::kFeatures) {
    const FlFeatureScore& fs = r.per_feature[corpus::index(f)];
    nlohmann::json entry{{"scored", fs.scored}};
    if (fs.report) {
      entry["weighted_f1"] = fs.report->weighted_f1;
      entry["report"] = to_json(*fs.report);
    } else {
      entry["weighted_f1"] = nullptr;
    }
    features[std::string(corpus::name(f))] = entry;
  }
  return nlohmann::json{{"mode", name(r.mode)}, {"features", features}, {"macro_f1", r.macro_f1}};
}

}  // namespace figstyle::harness
