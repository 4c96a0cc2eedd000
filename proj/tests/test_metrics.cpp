#include <doctest.h>

#include <algorithm>

#include "figstyle/error.hpp"
#include "figstyle/fl_scoring.hpp"
#include "figstyle/metrics.hpp"
#include "figstyle/util.hpp"
#include "oracles.hpp"

using namespace figstyle;
using namespace figstyle::harness;
using corpus::Assertion;
using corpus::Feature;
using Prediction6 = figstyle::flpipe::Assignment;

namespace {

using Labels = std::vector<std::string>;

corpus::Example labeled(const std::string& id, const std::string& dataset,
                        std::initializer_list<std::pair<Feature, Assertion>> labels) {
  corpus::Example ex;
  ex.id = id;
  ex.dataset = dataset;
  ex.split = corpus::Split::test;
  ex.text = "t";
  for (const auto& [f, a] : labels) ex.labels.set(f, a);
  return ex;
}

Prediction6 predicted(std::initializer_list<Feature> positives) {
  Prediction6 p;
  for (Feature f : positives) p.set(f, true);
  return p;
}

}  // namespace

TEST_CASE("weighted F1 hand case") {
  const Labels gold = {"A", "A", "B"};
  const Labels pred = {"A", "B", "B"};
  CHECK(std::abs(weighted_f1(gold, pred) - 2.0 / 3.0) <= 1e-12);
  const auto r = evaluate(gold, pred);
  REQUIRE(r.per_class.size() == 2);
  CHECK(r.per_class[0].label == "A");
  CHECK(r.per_class[0].precision == 1.0);
  CHECK(r.per_class[0].recall == 0.5);
  CHECK(r.per_class[1].precision == 0.5);
  CHECK(r.confusion == std::vector<std::vector<std::size_t>>{{1, 1}, {0, 1}});
}

TEST_CASE("weighted F1 edge cases") {
  CHECK(weighted_f1(Labels{"A", "B"}, Labels{"C", "C"}) == 0.0);
  CHECK(weighted_f1(Labels{"A", "A"}, Labels{"A", "A"}) == 1.0);
  CHECK_THROWS_AS(weighted_f1(Labels{"A"}, Labels{"A", "B"}), DataError);
  CHECK_THROWS_AS(weighted_f1(Labels{}, Labels{}), DataError);

  // A class only predicted appears with zero support and zero F1.
  const auto r = evaluate(Labels{"A", "A"}, Labels{"A", "Z"});
  REQUIRE(r.per_class.size() == 2);
  CHECK(r.per_class[1].label == "Z");
  CHECK(r.per_class[1].support == 0);
  CHECK(r.per_class[1].f1 == 0.0);
}

TEST_CASE("property: weighted F1 matches the brute-force oracle exactly") {
  Rng rng(1009);
  const Labels alphabet = {"a", "b", "c", "d", "e"};
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.below(40);
    const std::size_t k = 1 + rng.below(alphabet.size());
    Labels gold, pred;
    for (std::size_t i = 0; i < n; ++i) {
      gold.push_back(alphabet[rng.below(k)]);
      pred.push_back(alphabet[rng.below(k)]);
    }
    const double got = weighted_f1(gold, pred);
    CHECK(got == oracle::weighted_f1(gold, pred));
    CHECK(got >= 0.0);
    CHECK(got <= 1.0);

    const auto r = evaluate(gold, pred);
    std::size_t support = 0;
    for (const auto& c : r.per_class) support += c.support;
    CHECK(support == n);
    CHECK(std::is_sorted(r.labels.begin(), r.labels.end()));

    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    rng.shuffle(perm);
    Labels g2, p2;
    for (std::size_t i : perm) {
      g2.push_back(gold[i]);
      p2.push_back(pred[i]);
    }
    CHECK(weighted_f1(g2, p2) == doctest::Approx(got).epsilon(1e-12));
    CHECK(to_json(evaluate(g2, p2)).dump() == to_json(r).dump());
  }
}

TEST_CASE("report serialization") {
  auto r = evaluate(Labels{"x", "y"}, Labels{"x", "x"});
  r.runtime_seconds = 1.5;
  CHECK_FALSE(to_json(r).contains("runtime_seconds"));
  CHECK(to_json(r, true)["runtime_seconds"] == 1.5);
  CHECK(to_json(r)["confusion"]["labels"] == nlohmann::json::array({"x", "y"}));
}

TEST_CASE("FL scoring identity") {
  std::vector<corpus::Example> test = {
      labeled("1", "d1", {{Feature::metaphor, Assertion::positive}}),
      labeled("2", "d1", {{Feature::metaphor, Assertion::negative}}),
      labeled("3", "d2", {{Feature::sarcasm, Assertion::positive}, {Feature::irony, Assertion::positive}}),
      labeled("4", "d2", {{Feature::sarcasm, Assertion::negative}}),
  };
  std::map<std::string, Prediction6> preds = {
      {"1", predicted({Feature::metaphor})},
      {"2", predicted({})},
      {"3", predicted({Feature::sarcasm, Feature::irony})},
      {"4", predicted({})},
  };
  for (auto mode : {FlScoringMode::multilabel, FlScoringMode::per_task}) {
    const auto r = score_fl_predictions(test, preds, mode);
    CHECK(r.macro_f1 == 1.0);
    CHECK_FALSE(r.per_feature[corpus::index(Feature::simile)].report.has_value());
  }
  const auto ml = score_fl_predictions(test, preds, FlScoringMode::multilabel);
  CHECK(ml.per_feature[corpus::index(Feature::metaphor)].scored == 2);
  CHECK(ml.per_feature[corpus::index(Feature::irony)].scored == 1);
  const auto pt = score_fl_predictions(test, preds, FlScoringMode::per_task);
  CHECK(pt.per_feature[corpus::index(Feature::irony)].scored == 2);

  preds.erase("4");
  CHECK_THROWS_AS(score_fl_predictions(test, preds, FlScoringMode::multilabel), DataError);
}

TEST_CASE("FL scoring: cross-feature prediction counts against the task") {
  // A simile example from a dataset that also carries metaphors, predicted metaphor-positive.
  std::vector<corpus::Example> test = {
      labeled("m", "flute", {{Feature::metaphor, Assertion::positive}}),
      labeled("s", "flute", {{Feature::simile, Assertion::positive}}),
  };
  std::map<std::string, Prediction6> preds = {
      {"m", predicted({Feature::metaphor})},
      {"s", predicted({Feature::metaphor, Feature::simile})},
  };
  const auto pt = score_fl_predictions(test, preds, FlScoringMode::per_task);
  const auto& metaphor = pt.per_feature[corpus::index(Feature::metaphor)];
  REQUIRE(metaphor.report.has_value());
  CHECK(metaphor.scored == 2);
  CHECK(metaphor.report->confusion == std::vector<std::vector<std::size_t>>{{0, 1}, {0, 1}});
  CHECK(metaphor.report->weighted_f1 == oracle::weighted_f1({"positive", "negative"}, {"positive", "positive"}));

  const auto ml = score_fl_predictions(test, preds, FlScoringMode::multilabel);
  CHECK(ml.per_feature[corpus::index(Feature::metaphor)].scored == 1);
  CHECK(ml.per_feature[corpus::index(Feature::metaphor)].report->weighted_f1 == 1.0);
}

TEST_CASE("FL scoring hand confusion") {
  // Twelve sarcasm examples: gold 6 positive / 6 negative, 4 TP, 2 FN, 1 FP, 5 TN.
  std::vector<corpus::Example> test;
  std::map<std::string, Prediction6> preds;
  const bool gold[12] = {1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0};
  const bool guess[12] = {1, 1, 1, 1, 0, 0, 1, 0, 0, 0, 0, 0};
  Labels g, p;
  for (int i = 0; i < 12; ++i) {
    const std::string id = "e" + std::to_string(i);
    test.push_back(labeled(id, "sarc", {{Feature::sarcasm, gold[i] ? Assertion::positive : Assertion::negative}}));
    preds[id] = guess[i] ? predicted({Feature::sarcasm}) : predicted({});
    g.emplace_back(gold[i] ? "positive" : "negative");
    p.emplace_back(guess[i] ? "positive" : "negative");
  }
  const auto r = score_fl_predictions(test, preds, FlScoringMode::multilabel);
  const auto& s = *r.per_feature[corpus::index(Feature::sarcasm)].report;
  CHECK(s.confusion == std::vector<std::vector<std::size_t>>{{5, 1}, {2, 4}});
  // negative: p 5/7, r 5/6; positive: p 4/5, r 4/6
  const double f_neg = 2.0 * (5.0 / 7) * (5.0 / 6) / (5.0 / 7 + 5.0 / 6);
  const double f_pos = 2.0 * (4.0 / 5) * (4.0 / 6) / (4.0 / 5 + 4.0 / 6);
  CHECK(std::abs(s.weighted_f1 - (f_neg + f_pos) / 2) <= 1e-12);
  CHECK(s.weighted_f1 == oracle::weighted_f1(g, p));
  CHECK(r.macro_f1 == s.weighted_f1);
  CHECK(to_json(r)["features"]["simile"]["weighted_f1"].is_null());
  CHECK_THROWS_AS(fl_scoring_mode_from_name("macro"), ConfigError);
}
