// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "figstyle/error.hpp"
#include "figstyle/experiment.hpp"
#include "figstyle/flpipe.hpp"
#include "figstyle/io.hpp"
#include "figstyle/metrics.hpp"
#include "figstyle/mlp.hpp"
#include "figstyle/ngrams.hpp"
#include "figstyle/stylometry.hpp"
#include "figstyle/wordlists.hpp"
#include "gradcheck.hpp"
#include "oracles.hpp"
#include "pipeline.hpp"
#include "synthetic.hpp"
#include "tmpdir.hpp"

using namespace figstyle;
using corpus::Assertion;
using corpus::Example;
using corpus::Feature;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Collects failed sub-checks for one criterion.
struct Verdict {
  std::vector<std::string> failures;
  std::string detail;

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

std::string num(double v, int precision = 6) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

// ---------------------------------------------------------------- binary sets

Example with_label(const std::string& id, Feature f, Assertion a) {
  Example ex;
  ex.id = id;
  ex.dataset = "pool";
  ex.text = id;
  ex.labels.set(f, a);
  return ex;
}

void binary_sets(Verdict& v) {
  struct Row {
    Feature f;
    std::size_t p, q, pos, neg, lit;
  };
  // Train pools summed over the source datasets, with the expected (pos, neg, lit) rows.
  const std::vector<Row> rows = {
      {Feature::metaphor, 15056, 3972, 15056, 3972, 11084},
      {Feature::simile, 5212, 0, 5212, 0, 5212},
      {Feature::sarcasm, 7152, 7846, 7152, 3576, 3576},
      {Feature::idiom, 15732, 0, 15732, 0, 15732},
      {Feature::irony, 2566, 7367, 2566, 1283, 1283},
  };
  const std::size_t kTrainLiterals = 18328;
  std::vector<Example> literals;
  for (std::size_t i = 0; i < kTrainLiterals; ++i) {
    Example ex;
    ex.id = "lit" + std::to_string(i);
    ex.dataset = "pool";
    ex.text = ex.id;
    ex.labels.set_literal();
    literals.push_back(std::move(ex));
  }
  auto task_pool = [](Feature f, std::size_t p, std::size_t q) {
    std::vector<Example> pool;
    for (std::size_t i = 0; i < p; ++i) pool.push_back(with_label("p" + std::to_string(i), f, Assertion::positive));
    for (std::size_t i = 0; i < q; ++i) pool.push_back(with_label("q" + std::to_string(i), f, Assertion::negative));
    return pool;
  };
  auto count = [](const flpipe::BinarySet& set, Feature f) {
    std::size_t pos = 0;
    for (const auto& ex : set.examples) pos += ex.labels.get(f) == Assertion::positive;
    return pos;
  };

  const auto t0 = Clock::now();
  for (const auto& r : rows) {
    const auto set = flpipe::build_binary_training_set(r.f, task_pool(r.f, r.p, r.q), literals, 1);
    const std::string n(corpus::name(r.f));
    v.expect(set.plan.n_pos == r.pos && set.plan.n_neg == r.neg && set.plan.n_lit == r.lit,
             n + " plan " + std::to_string(set.plan.n_pos) + "/" + std::to_string(set.plan.n_neg) + "/" +
                 std::to_string(set.plan.n_lit));
    v.expect(set.examples.size() == r.pos + r.neg + r.lit, n + " size");
    v.expect(count(set, r.f) == r.pos, n + " positives in output");
  }
  // Hyperbole: 3722 train positives, 4295 explicit negatives.
  const auto hyp = flpipe::build_binary_training_set(Feature::hyperbole, task_pool(Feature::hyperbole, 3722, 4295),
                                                     literals, 1);
  v.expect(hyp.plan.n_neg == 1861 && hyp.plan.n_lit == 1861, "hyperbole n_neg = n_lit = 1861");
  const double elapsed = seconds_since(t0);
  v.expect(elapsed < 1.0, "runtime " + num(elapsed) + " s");
  v.detail = "5 rows exact, hyperbole 1861/1861, " + num(elapsed, 3) + " s";
}

// ---------------------------------------------------------------- consistency

void consistency(Verdict& v) {
  using flpipe::Assignment;
  auto assign = [](std::initializer_list<Feature> on) {
    Assignment a;
    for (Feature f : on) a.set(f, true);
    return a;
  };
  corpus::LabelAssertions human;
  human.set(Feature::metaphor, Assertion::positive);
  human.set(Feature::idiom, Assertion::positive);
  v.expect(flpipe::filter_consistent(human, assign({Feature::metaphor, Feature::idiom, Feature::simile})),
           "worked example accept");
  v.expect(!flpipe::filter_consistent(human, assign({Feature::metaphor})), "worked example reject");

  Rng rng(691);
  std::size_t disagreements = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::string> raw;
    corpus::LabelAssertions labels;
    if (rng.uniform() < 0.2) {
      labels.set_literal();
      raw.push_back("literal");
      for (Feature f : corpus::kFeatures) {
        if (rng.uniform() < 0.2) {
          labels.set(f, Assertion::negative);
          raw.push_back("not_" + std::string(corpus::name(f)));
        }
      }
    } else {
      for (Feature f : corpus::kFeatures) {
        const double u = rng.uniform();
        if (u < 0.3) {
          labels.set(f, Assertion::positive);
          raw.emplace_back(corpus::name(f));
        } else if (u < 0.5) {
          labels.set(f, Assertion::negative);
          raw.push_back("not_" + std::string(corpus::name(f)));
        }
      }
    }
    std::array<bool, 6> flags{};
    for (bool& b : flags) b = rng.uniform() < 0.5;
    disagreements += flpipe::filter_consistent(labels, Assignment(flags)) != oracle::consistent(raw, flags);
  }
  v.expect(disagreements == 0, std::to_string(disagreements) + " disagreements");
  v.detail = "worked pair exact, 1000 random cases, " + std::to_string(disagreements) + " disagreements";
}

// ---------------------------------------------------------------- stylometry

void stylometric_oracles(Verdict& v) {
  using namespace stylometry;
  const auto doc = tokenize("The cat sat. The cat ran fast.");
  const FrequencySpectrum spec(doc.tokens);
  const auto surface = compute_surface_and_ratio_metrics(doc, spec);
  const auto rich = compute_lexical_richness_metrics(spec);
  const double ttr = surface.get(Metric::type_token_ratio);
  const double hapax = surface.get(Metric::hapax_legomena_ratio);
  const double yule = rich.get(Metric::yule_k);
  const double guiraud = rich.get(Metric::guiraud_r);
  v.expect(std::abs(ttr - 5.0 / 7.0) <= 1e-6, "TTR " + num(ttr));
  v.expect(std::abs(hapax - 3.0 / 7.0) <= 1e-6, "hapax ratio " + num(hapax));
  v.expect(std::abs(yule - 816.3265) <= 1e-4 && std::abs(yule - oracle::yule_k(doc.tokens)) <= 1e-6,
           "Yule K " + num(yule, 10));
  v.expect(std::abs(guiraud - 1.889822) <= 1e-6, "Guiraud R " + num(guiraud, 10));

  Rng rng(692);
  WordFrequencyTable freq;
  std::vector<std::string> texts;
  for (int i = 0; i < 20; ++i) texts.push_back(synthetic::fuzz_text(rng));
  for (const auto& t : texts) freq.add(tokenize(t).tokens);
  std::size_t bad_slots = 0;
  for (const auto& t : texts) {
    const auto vec = compute_stylo_vector(t, freq);
    if (vec.values.size() != 52) ++bad_slots;
    for (double x : vec.values) bad_slots += !std::isfinite(x);
  }
  v.expect(bad_slots == 0, std::to_string(bad_slots) + " missing or non-finite slots");

  std::size_t broken = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::string> toks;
    const std::size_t n = 1 + rng.below(200);
    const std::size_t k = 1 + rng.below(40);
    for (std::size_t i = 0; i < n; ++i) toks.push_back("w" + std::to_string(rng.below(k)));
    const FrequencySpectrum s(toks);
    std::size_t sum_iv = 0, sum_v = 0;
    for (const auto& [i, c] : s.spectrum()) {
      sum_iv += i * c;
      sum_v += c;
    }
    const auto counts = oracle::counts(toks);
    std::size_t ones = 0;
    for (const auto& [w, c] : counts) ones += c == 1;
    broken += sum_iv != s.tokens() || sum_v != s.types() || s.types() != counts.size() || s.hapax() != ones;
  }
  v.expect(broken == 0, std::to_string(broken) + " spectrum streams violate identities");
  v.detail = "TTR " + num(ttr) + ", hapax " + num(hapax) + ", K " + num(yule, 10) + ", R " + num(guiraud, 10) +
             "; 20 fuzz docs x 52 finite; 1000 streams";
}

// ---------------------------------------------------------------- tf-idf

void tfidf_oracle(Verdict& v) {
  using namespace ngrams;
  auto cfg = [](Analyzer a, int lo, int hi, std::size_t vocab, StopwordPolicy stop) {
    NgramConfig c;
    c.analyzer = a;
    c.n_min = lo;
    c.n_max = hi;
    c.vocab_size = vocab;
    c.stopwords = stop;
    return c;
  };
  Rng rng(693);
  const auto& stop = wordlists::stopwords();
  const std::unordered_set<std::string> stop_set(stop.begin(), stop.end());
  double worst = 0.0;
  std::size_t vocab_mismatch = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const bool use_stop = trial % 2 == 1;
    const auto docs = synthetic::tfidf_corpus(rng, use_stop);
    const bool word = trial % 4 < 2;
    const int lo = 1 + static_cast<int>(rng.below(2));
    const int hi = lo + static_cast<int>(rng.below(3));
    const std::size_t vocab = 1 + rng.below(40);
    const auto want = oracle::tfidf(docs, word, lo, hi, vocab, use_stop ? &stop_set : nullptr);
    const auto got = FittedVectorizer::fit(
        docs, cfg(word ? Analyzer::word : Analyzer::character, lo, hi, vocab,
                  use_stop ? StopwordPolicy::both : StopwordPolicy::none));
    if (got.vocabulary() != want.vocabulary) {
      ++vocab_mismatch;
      continue;
    }
    for (std::size_t d = 0; d < docs.size(); ++d) {
      const auto row = got.transform_dense(docs[d]);
      for (std::size_t j = 0; j < row.size(); ++j) worst = std::max(worst, std::abs(row[j] - want.rows[d][j]));
    }
  }
  v.expect(vocab_mismatch == 0, std::to_string(vocab_mismatch) + " vocabulary mismatches");
  v.expect(worst <= 1e-12, "max deviation " + num(worst));

  const std::vector<std::string> two = {"a b", "a c"};
  const auto fit = FittedVectorizer::fit(two, cfg(Analyzer::word, 1, 1, 3, StopwordPolicy::none));
  const auto x = fit.transform_dense("a b");
  const double idf = fit.idf().size() == 3 ? fit.idf()[1] : 0.0;
  v.expect(std::abs(idf - 1.405465) <= 1e-4, "idf " + num(idf));
  v.expect(x.size() == 3 && std::abs(x[0] - 0.5797) <= 1e-4 && std::abs(x[1] - 0.8148) <= 1e-4 &&
               std::abs(x[2]) <= 1e-4,
           "worked weights");
  v.detail = "50 corpora, max deviation " + num(worst) + "; idf " + num(idf) + ", weights (" +
             (x.size() == 3 ? num(x[0], 4) + ", " + num(x[1], 4) + ", " + num(x[2], 4) : std::string("?")) + ")";
}

// ---------------------------------------------------------------- mlp

void mlp_checks(Verdict& v) {
  Rng rng(694);
  double worst_grad = 0.0;
  double worst_softmax = 0.0;
  for (int net = 0; net < 20; ++net) {
    const auto in = static_cast<Eigen::Index>(2 + rng.below(5));
    const auto hid = static_cast<Eigen::Index>(2 + rng.below(6));
    const auto cls = static_cast<Eigen::Index>(2 + rng.below(3));
    const auto n = static_cast<Eigen::Index>(1 + rng.below(8));
    const auto p = mlp::init_params(in, hid, cls, static_cast<std::uint64_t>(net));
    const auto X = gradcheck::random_matrix(rng, n, in);
    worst_grad = std::max(worst_grad, gradcheck::max_relative_error(p, X, gradcheck::onehot(rng, n, cls)));
    const auto fp = mlp::forward(p, gradcheck::random_matrix(rng, n, in, 50.0));
    for (Eigen::Index i = 0; i < fp.probs.rows(); ++i) {
      worst_softmax = std::max(worst_softmax, std::abs(fp.probs.row(i).sum() - 1.0));
    }
  }
  v.expect(worst_grad < 1e-4, "gradient relative error " + num(worst_grad));
  v.expect(worst_softmax <= 1e-12, "softmax row deviation " + num(worst_softmax));

  mlp::Params params = mlp::init_params(5, 4, 3, 9);
  const mlp::Params before = params;
  mlp::Params grads = mlp::Params::zeros_like(params);
  grads.w1.setOnes();
  grads.b1.setOnes();
  grads.w2.setOnes();
  grads.b2.setOnes();
  auto state = mlp::AdamState::zeros_like(params);
  const mlp::AdamConfig cfg;
  mlp::adam_step(params, grads, state, 1, cfg);
  double worst_step = 0.0;
  auto track = [&](const auto& a, const auto& b) {
    worst_step = std::max(worst_step, ((a - b).array().abs() - cfg.learning_rate).abs().maxCoeff());
  };
  track(before.w1, params.w1);
  track(before.b1, params.b1);
  track(before.w2, params.w2);
  track(before.b2, params.b2);
  v.expect(worst_step <= 1e-9, "Adam step deviation " + num(worst_step));
  v.detail = "20 nets, grad rel err " + num(worst_grad, 3) + ", softmax dev " + num(worst_softmax, 3) +
             ", Adam step dev " + num(worst_step, 3);
}

// ---------------------------------------------------------------- end to end

void end_to_end(Verdict& v) {
  TempDir dir("acceptance-aa");
  corpus::write_docs(dir / "corpus.jsonl", synthetic::aa_corpus(5, 40, 695));
  std::string detail;
  const auto t0 = Clock::now();
  for (const std::string features : {"char_tfidf", "word_tfidf"}) {
    config::Config cfg = config::Config::parse(
        "corpus = \"corpus.jsonl\"\n"
        "features = \"" + features + "\"\n"
        "seed = 695\n"
        "[train]\n"
        "learning_rate = 0.001\n");
    cfg.set_base_dir(dir.path());
    auto spec = harness::spec_from_config(cfg);
    const auto result = harness::run_experiment(spec);
    const double f1 = result.report.weighted_f1;
    v.expect(result.n_test == 20, features + " test size " + std::to_string(result.n_test));
    v.expect(f1 >= 0.9, features + " weighted F1 " + num(f1, 4));
    detail += (detail.empty() ? "" : ", ") + features + " F1 " + num(f1, 4);
  }
  const double elapsed = seconds_since(t0);
  v.expect(elapsed < 120.0, "runtime " + num(elapsed) + " s");
  v.detail = "5 authors x 40 docs, 20 held out: " + detail + ", " + num(elapsed, 3) + " s";
}

// ---------------------------------------------------------------- calibration

void calibration(Verdict& v) {
  Rng rng(696);
  std::vector<flpipe::ProbRecord> dev;
  std::map<std::string, corpus::LabelAssertions> ref;
  std::array<std::vector<double>, 6> probs;
  std::array<std::vector<bool>, 6> gold;
  // Positives draw from [0.35, 0.95], negatives from [0.05, 0.65], on the 0.001 grid.
  for (int i = 0; i < 200; ++i) {
    flpipe::ProbRecord r;
    r.id = "dev" + std::to_string(i);
    corpus::LabelAssertions l;
    for (std::size_t f = 0; f < 6; ++f) {
      const bool pos = rng.uniform() < 0.2 + 0.1 * static_cast<double>(f);
      const double base = pos ? 0.35 : 0.05;
      r.probs[f] = base + static_cast<double>(rng.below(601)) / 1000.0;
      l.set(corpus::kFeatures[f], pos ? Assertion::positive : Assertion::negative);
      probs[f].push_back(r.probs[f]);
      gold[f].push_back(pos);
    }
    dev.push_back(r);
    ref[r.id] = l;
  }
  const auto res = flpipe::calibrate_thresholds(dev, ref, flpipe::CalibrationSource::human);
  std::string thresholds;
  for (std::size_t f = 0; f < 6; ++f) {
    const auto [t, score] = oracle::best_threshold(probs[f], gold[f]);
    const std::string n(corpus::name(corpus::kFeatures[f]));
    v.expect(res.thresholds.thresholds[f] == t, n + " threshold " + num(res.thresholds.thresholds[f]) + " vs " + num(t));
    v.expect(res.per_feature[f].f1 == score, n + " F1 " + num(res.per_feature[f].f1) + " vs " + num(score));
    thresholds += (thresholds.empty() ? "" : " ") + num(t, 2);
  }

  // Separable: positives at or above 0.6, negatives at or below 0.4.
  std::vector<flpipe::ProbRecord> sep;
  std::map<std::string, corpus::LabelAssertions> sep_ref;
  for (int i = 0; i < 200; ++i) {
    flpipe::ProbRecord r;
    r.id = "sep" + std::to_string(i);
    corpus::LabelAssertions l;
    for (std::size_t f = 0; f < 6; ++f) {
      const bool pos = rng.uniform() < 0.5;
      r.probs[f] = pos ? 0.6 + 0.4 * rng.uniform() : 0.4 * rng.uniform();
      l.set(corpus::kFeatures[f], pos ? Assertion::positive : Assertion::negative);
    }
    sep.push_back(r);
    sep_ref[r.id] = l;
  }
  const auto sep_res = flpipe::calibrate_thresholds(sep, sep_ref, flpipe::CalibrationSource::human);
  double worst = 1.0;
  for (Feature f : corpus::kFeatures) {
    std::vector<std::string> g, p;
    for (const auto& r : sep) {
      const auto a = flpipe::apply_thresholds(r, sep_res.thresholds);
      g.emplace_back(sep_ref[r.id].get(f) == Assertion::positive ? "positive" : "negative");
      p.emplace_back(a[f] ? "positive" : "negative");
    }
    worst = std::min(worst, harness::weighted_f1(g, p));
  }
  v.expect(worst == 1.0, "separable dev F1 " + num(worst));
  v.detail = "200 planted examples, thresholds [" + thresholds + "] match the sweep; separable F1 " + num(worst);
}

// ---------------------------------------------------------------- weighted f1

void weighted_f1(Verdict& v) {
  Rng rng(697);
  const std::vector<std::string> alphabet = {"a", "b", "c", "d", "e"};
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.below(40);
    const std::size_t k = 1 + rng.below(alphabet.size());
    std::vector<std::string> gold, pred;
    for (std::size_t i = 0; i < n; ++i) {
      gold.push_back(alphabet[rng.below(k)]);
      pred.push_back(alphabet[rng.below(k)]);
    }
    mismatches += harness::weighted_f1(gold, pred) != oracle::weighted_f1(gold, pred);
  }
  const std::vector<std::string> gold = {"A", "A", "B"};
  const std::vector<std::string> pred = {"A", "B", "B"};
  const double hand = harness::weighted_f1(gold, pred);
  v.expect(mismatches == 0, std::to_string(mismatches) + " mismatches");
  v.expect(std::abs(hand - 2.0 / 3.0) <= 1e-12, "hand case " + num(hand, 17));
  v.detail = "500 vectors, " + std::to_string(mismatches) + " mismatches; hand case " + num(hand, 17);
}

// ---------------------------------------------------------------- determinism

void determinism(Verdict& v) {
  TempDir dir("acceptance-stages");
  pipeline::write_inputs(dir.path());
  std::size_t files = 0;
  const auto stages = pipeline::stages(dir.path());
  for (const auto& stage : stages) {
    const auto first = pipeline::cli(stage.args);
    if (first.code != 0) {
      v.expect(false, stage.name + " exited " + std::to_string(first.code) + ": " + first.err);
      return;
    }
    std::vector<std::string> contents;
    for (const auto& out : stage.outputs) contents.push_back(io::read_file(dir / out));
    const auto second = pipeline::cli(stage.args);
    v.expect(second.code == 0, stage.name + " second run exited " + std::to_string(second.code));
    for (std::size_t i = 0; i < stage.outputs.size(); ++i) {
      v.expect(io::read_file(dir / stage.outputs[i]) == contents[i], stage.name + " changed " + stage.outputs[i]);
      ++files;
    }
  }
  v.detail = std::to_string(stages.size()) + " stages, " + std::to_string(files) + " output files byte-identical";
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* title;
    std::function<void(Verdict&)> run;
  };
  const std::vector<Criterion> criteria = {
      {"AC1", "binary-set arithmetic", binary_sets},
      {"AC2", "consistency filter", consistency},
      {"AC3", "stylometric oracles", stylometric_oracles},
      {"AC4", "tf-idf oracle", tfidf_oracle},
      {"AC5", "mlp gradients, softmax, adam", mlp_checks},
      {"AC6", "desk-scale attribution", end_to_end},
      {"AC7", "threshold calibration", calibration},
      {"AC8", "weighted f1", weighted_f1},
      {"AC9", "stage determinism", determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Verdict v;
    try {
      c.run(v);
    } catch (const std::exception& e) {
      v.failures.push_back(std::string("exception: ") + e.what());
    }
    const bool ok = v.failures.empty();
    failed += !ok;
    std::printf("%s %s %s: %s\n", ok ? "PASS" : "FAIL", c.id, c.title, v.detail.c_str());
    for (const auto& f : v.failures) std::printf("     - %s\n", f.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
