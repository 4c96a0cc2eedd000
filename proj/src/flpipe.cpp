#include "figstyle/flpipe.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "figstyle/error.hpp"
#include "figstyle/io.hpp"
#include "figstyle/util.hpp"

namespace figstyle::flpipe {

using corpus::Assertion;
using corpus::kFeatures;
using io::Json;

Json to_json(const BinarySetPlan& plan) {
  return Json{{"feature", corpus::name(plan.feature)},
              {"n_pos", plan.n_pos},
              {"n_neg", plan.n_neg},
              {"n_lit", plan.n_lit},
              {"seed", plan.seed}};
}

BinarySetPlan plan_binary_set(Feature feature, std::size_t positives, std::size_t negatives,
                              std::uint64_t seed) {
  if (positives == 0) {
    throw DataError("no positive examples for " + std::string(corpus::name(feature)));
  }
  BinarySetPlan plan;
  plan.feature = feature;
  plan.seed = seed;
  plan.n_pos = positives;
  plan.n_neg = std::min(negatives, positives / 2);
  plan.n_lit = 2 * positives - positives - plan.n_neg;
  return plan;
}

namespace {

Example relabeled(const Example& src, Feature feature, bool positive) {
  Example ex = src;
  ex.labels = LabelAssertions{};
  ex.labels.set(feature, positive ? Assertion::positive : Assertion::negative);
  return ex;
}

// Uniform sample of k indices without replacement, returned in ascending order.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  rng.partial_shuffle(idx, k);
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

BinarySet build_binary_training_set(Feature feature, std::span<const Example> task_pool,
                                    std::span<const Example> literal_pool, std::uint64_t seed) {
  std::vector<const Example*> positives;
  std::vector<const Example*> negatives;
  std::unordered_set<std::string_view> task_ids;
  for (const auto& ex : task_pool) {
    task_ids.insert(ex.id);
    switch (ex.labels.get(feature)) {
      case Assertion::positive: positives.push_back(&ex); break;
      case Assertion::negative: negatives.push_back(&ex); break;
      case Assertion::unknown:
        throw DataError("task pool example \"" + ex.id + "\" has no " +
                        std::string(corpus::name(feature)) + " assertion");
    }
  }
  for (const auto& ex : literal_pool) {
    if (!ex.labels.literal()) throw DataError("literal pool example \"" + ex.id + "\" is not literal");
    if (task_ids.contains(ex.id)) {
      throw DataError("example \"" + ex.id + "\" is in both the task and literal pools");
    }
  }

  BinarySet out;
  out.plan = plan_binary_set(feature, positives.size(), negatives.size(), seed);
  if (literal_pool.size() < out.plan.n_lit) {
    throw DataError("literal pool too small for " + std::string(corpus::name(feature)) +
                    ": need " + std::to_string(out.plan.n_lit) + ", have " +
                    std::to_string(literal_pool.size()));
  }

  Rng rng(seed);
  out.examples.reserve(2 * out.plan.n_pos);
  for (const Example* ex : positives) out.examples.push_back(relabeled(*ex, feature, true));
  for (std::size_t i : sample_indices(negatives.size(), out.plan.n_neg, rng)) {
    out.examples.push_back(relabeled(*negatives[i], feature, false));
  }
  for (std::size_t i : sample_indices(literal_pool.size(), out.plan.n_lit, rng)) {
    out.examples.push_back(relabeled(literal_pool[i], feature, false));
  }
  return out;
}

Pools select_pools(std::span<const Example> collection, Feature feature) {
  Pools pools;
  for (const auto& ex : collection) {
    if (ex.labels.get(feature) != Assertion::unknown) {
      pools.task.push_back(ex);
    } else if (ex.labels.literal()) {
      pools.literal.push_back(ex);
    }
  }
  return pools;
}

std::vector<std::string> Assignment::positive_names() const {
  std::vector<std::string> out;
  for (Feature f : kFeatures) {
    if ((*this)[f]) out.emplace_back(corpus::name(f));
  }
  return out;
}

LabelAssertions Assignment::to_assertions() const {
  LabelAssertions a;
  for (Feature f : kFeatures) a.set(f, (*this)[f] ? Assertion::positive : Assertion::negative);
  return a;
}

bool filter_consistent(const LabelAssertions& human, const Assignment& predicted) {
  for (Feature f : kFeatures) {
    const Assertion h = human.effective(f);
    if (h == Assertion::positive && !predicted[f]) return false;
    if (h == Assertion::negative && predicted[f]) return false;
  }
  return true;
}

ProbRecord parse_prob_record(const Json& record) {
  ProbRecord rec;
  rec.id = io::require_string(record, "id");
  const Json& probs = io::require(record, "probs");
  if (!probs.is_object()) throw DataError("field \"probs\" must be an object");
  std::array<bool, corpus::kFeatureCount> seen{};
  for (auto it = probs.begin(); it != probs.end(); ++it) {
    const Feature f = corpus::feature_from_name(it.key());
    if (!it.value().is_number()) throw DataError("probability for " + it.key() + " is not a number");
    const double p = it.value().get<double>();
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
      throw DataError("probability for " + it.key() + " outside [0,1] in \"" + rec.id + "\"");
    }
    rec.probs[corpus::index(f)] = p;
    seen[corpus::index(f)] = true;
  }
  for (Feature f : kFeatures) {
    if (!seen[corpus::index(f)]) {
      throw DataError("missing probability for " + std::string(corpus::name(f)) + " in \"" +
                      rec.id + "\"");
    }
  }
  return rec;
}

Json to_json(const ProbRecord& rec) {
  Json probs = Json::object();
  for (Feature f : kFeatures) probs[std::string(corpus::name(f))] = rec[f];
  return Json{{"id", rec.id}, {"probs", probs}};
}

std::vector<ProbRecord> load_predictions(const std::filesystem::path& path) {
  std::vector<ProbRecord> out;
  std::unordered_set<std::string> ids;
  io::read_jsonl(path, [&](const Json& record, std::size_t) {
    ProbRecord rec = parse_prob_record(record);
    if (!ids.insert(rec.id).second) throw DataError("duplicate prediction id \"" + rec.id + "\"");
    out.push_back(std::move(rec));
  });
  return out;
}

std::string_view name(CalibrationSource s) {
  return s == CalibrationSource::human ? "human" : "binary";
}

CalibrationSource calibration_source_from_name(std::string_view s) {
  if (s == "human") return CalibrationSource::human;
  if (s == "binary") return CalibrationSource::binary;
  throw ConfigError("calibration source must be human or binary, got \"" + std::string(s) + "\"");
}

Json to_json(const ThresholdSet& t) {
  Json th = Json::object();
  for (Feature f : kFeatures) th[std::string(corpus::name(f))] = t[f];
  return Json{{"source", name(t.source)}, {"thresholds", th}};
}

ThresholdSet thresholds_from_json(const Json& j) {
  ThresholdSet t;
  const std::string source = io::require_string(j, "source");
  if (source != "human" && source != "binary") throw DataError("unknown threshold source " + source);
  t.source = calibration_source_from_name(source);
  const Json& th = io::require(j, "thresholds");
  if (!th.is_object()) throw DataError("field \"thresholds\" must be an object");
  std::array<bool, corpus::kFeatureCount> seen{};
  for (auto it = th.begin(); it != th.end(); ++it) {
    const Feature f = corpus::feature_from_name(it.key());
    if (!it.value().is_number()) throw DataError("threshold for " + it.key() + " is not a number");
    const double v = it.value().get<double>();
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw DataError("threshold for " + it.key() + " outside [0,1]");
    }
    t.thresholds[corpus::index(f)] = v;
    seen[corpus::index(f)] = true;
  }
  for (Feature f : kFeatures) {
    if (!seen[corpus::index(f)]) throw DataError("missing threshold for " + std::string(corpus::name(f)));
  }
  return t;
}

Assignment apply_thresholds(const ProbRecord& probs, const ThresholdSet& thresholds) {
  Assignment a;
  for (Feature f : kFeatures) a.set(f, probs[f] >= thresholds[f]);
  return a;
}

Assignment threshold_at_half(const ProbRecord& probs) {
  Assignment a;
  for (Feature f : kFeatures) a.set(f, probs[f] >= 0.5);
  return a;
}

MultilabelResult build_multilabel_corpus(std::span<const Example> examples,
                                         std::span<const ProbRecord> predictions) {
  std::unordered_map<std::string_view, const ProbRecord*> by_id;
  for (const auto& p : predictions) {
    if (!by_id.emplace(p.id, &p).second) throw DataError("duplicate prediction id \"" + p.id + "\"");
  }
  MultilabelResult out;
  for (const auto& ex : examples) {
    auto it = by_id.find(ex.id);
    if (it == by_id.end()) throw DataError("missing prediction for \"" + ex.id + "\"");
    const Assignment predicted = threshold_at_half(*it->second);
    if (!filter_consistent(ex.labels, predicted)) {
      ++out.discarded;
      continue;
    }
    Example accepted = ex;
    accepted.labels = predicted.to_assertions();
    out.accepted.push_back(std::move(accepted));
    ++out.kept;
  }
  return out;
}

namespace {

double f1_from(double tp, double predicted, double support) {
  const double precision = predicted > 0 ? tp / predicted : 0.0;
  const double recall = support > 0 ? tp / support : 0.0;
  return (precision + recall) > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

// Same arithmetic order as harness::evaluate over the labels {negative, positive}.
double binary_weighted_f1(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn) {
  const double n_pos = static_cast<double>(tp + fn);
  const double n_neg = static_cast<double>(tn + fp);
  const double f1_neg = f1_from(static_cast<double>(tn), static_cast<double>(tn + fn), n_neg);
  const double f1_pos = f1_from(static_cast<double>(tp), static_cast<double>(tp + fp), n_pos);
  double weighted = 0.0;
  weighted += f1_neg * n_neg;
  weighted += f1_pos * n_pos;
  return weighted / (n_pos + n_neg);
}

}  // namespace

CalibrationResult calibrate_thresholds(std::span<const ProbRecord> dev,
                                       const std::map<std::string, LabelAssertions>& reference,
                                       CalibrationSource source) {
  if (dev.empty()) throw DataError("calibration set is empty");
  CalibrationResult result;
  result.thresholds.source = source;

  std::vector<const LabelAssertions*> refs;
  refs.reserve(dev.size());
  for (const auto& rec : dev) {
    auto it = reference.find(rec.id);
    if (it == reference.end()) throw DataError("no reference labels for \"" + rec.id + "\"");
    refs.push_back(&it->second);
  }

  for (Feature f : kFeatures) {
    std::vector<std::pair<double, bool>> points;
    for (std::size_t i = 0; i < dev.size(); ++i) {
      const Assertion a = refs[i]->effective(f);
      if (a == Assertion::unknown) {
        if (source == CalibrationSource::binary) {
          throw DataError("binary reference for \"" + dev[i].id + "\" lacks " +
                          std::string(corpus::name(f)));
        }
        continue;
      }
      points.emplace_back(dev[i][f], a == Assertion::positive);
    }
    if (points.empty()) {
      throw DataError("no reference labels for feature " + std::string(corpus::name(f)));
    }
    FeatureCalibration& cal = result.per_feature[corpus::index(f)];
    cal.labelled = points.size();
    double best = -1.0;
    for (int k = 0; k <= kGridSteps; ++k) {
      const double t = grid_threshold(k);
      std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
      for (const auto& [p, positive] : points) {
        const bool predicted = p >= t;
        if (positive) {
          ++(predicted ? tp : fn);
        } else {
          ++(predicted ? fp : tn);
        }
      }
      const double score = binary_weighted_f1(tp, fp, fn, tn);
      cal.curve[static_cast<std::size_t>(k)] = score;
      if (score > best) {
        best = score;
        cal.threshold = t;
        cal.f1 = score;
      }
    }
    result.thresholds.thresholds[corpus::index(f)] = cal.threshold;
  }
  return result;
}

bool project_gold_for_binary_task(const LabelAssertions& labels, Feature task) {
  if (labels.empty()) throw DataError("example carries no assertions");
  return labels.get(task) == Assertion::positive;
}

}  // namespace figstyle::flpipe
