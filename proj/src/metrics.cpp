#include "figstyle/metrics.hpp"

#include <map>

#include "figstyle/error.hpp"

namespace figstyle::harness {

EvalReport evaluate(std::span<const std::string> gold, std::span<const std::string> pred) {
  if (gold.size() != pred.size()) {
    throw DataError("gold/pred length mismatch: " + std::to_string(gold.size()) + " vs " +
                    std::to_string(pred.size()));
  }
  if (gold.empty()) throw DataError("cannot evaluate an empty label set");

  std::map<std::string, std::size_t> axis;
  for (const auto& g : gold) axis.emplace(g, 0);
  for (const auto& p : pred) axis.emplace(p, 0);
  EvalReport r;
  for (auto& [label, idx] : axis) {
    idx = r.labels.size();
    r.labels.push_back(label);
  }
  const std::size_t k = r.labels.size();
  r.confusion.assign(k, std::vector<std::size_t>(k, 0));
  for (std::size_t i = 0; i < gold.size(); ++i) ++r.confusion[axis[gold[i]]][axis[pred[i]]];

  double weighted = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t tp = r.confusion[c][c];
    std::size_t support = 0;
    std::size_t predicted = 0;
    for (std::size_t j = 0; j < k; ++j) {
      support += r.confusion[c][j];
      predicted += r.confusion[j][c];
    }
    ClassStats s;
    s.label = r.labels[c];
    s.support = support;
    s.precision = predicted ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
    s.recall = support ? static_cast<double>(tp) / static_cast<double>(support) : 0.0;
    s.f1 = (s.precision + s.recall) > 0.0
               ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
               : 0.0;
    weighted += s.f1 * static_cast<double>(support);
    r.per_class.push_back(s);
  }
  r.weighted_f1 = weighted / static_cast<double>(gold.size());
  return r;
}

double weighted_f1(std::span<const std::string> gold, std::span<const std::string> pred) {
  return evaluate(gold, pred).weighted_f1;
}

nlohmann::json to_json(const EvalReport& report, bool include_runtime) {
  nlohmann::json per_class = nlohmann::json::array();
  for (const auto& s : report.per_class) {
    per_class.push_back({{"label", s.label},
                         {"precision", s.precision},
                         {"recall", s.recall},
                         {"f1", s.f1},
                         {"support", s.support}});
  }
  nlohmann::json j{{"weighted_f1", report.weighted_f1},
                   {"per_class", per_class},
                   {"confusion", {{"labels", report.labels}, {"matrix", report.confusion}}},
                   {"config", report.config}};
  if (include_runtime) j["runtime_seconds"] = report.runtime_seconds;
  return j;
}

}  // namespace figstyle::harness
