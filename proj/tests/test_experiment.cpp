#include <doctest.h>

#include <algorithm>

#include "figstyle/embed.hpp"
#include "figstyle/error.hpp"
#include "figstyle/experiment.hpp"
#include "figstyle/io.hpp"
#include "synthetic.hpp"
#include "tmpdir.hpp"

using namespace figstyle;
using namespace figstyle::harness;

namespace {

ExperimentSpec make_spec(const TempDir& dir, const std::string& features) {
  ExperimentSpec spec;
  spec.corpus = dir / "corpus.jsonl";
  spec.name = "synthetic";
  spec.dataset = "synthetic";
  spec.features = parse_feature_set(features);
  spec.train.adam.learning_rate = 1e-3;
  spec.seed = 11;
  spec.output_dir = dir / "out";
  return spec;
}

}  // namespace

TEST_CASE("synthetic attribution end to end") {
  TempDir dir("experiment");
  const auto docs = synthetic::aa_corpus(5, 40, 3);
  corpus::write_docs(dir / "corpus.jsonl", docs);
  std::vector<std::string> train_ids;
  std::vector<std::string> all_ids;
  for (const auto& d : docs) {
    all_ids.push_back(d.doc_id);
    if (d.split == corpus::Split::train) train_ids.push_back(d.doc_id);
  }

  const auto spec = make_spec(dir, "char_tfidf");
  const auto result = run_experiment(spec);
  CHECK(result.n_train == 180);
  CHECK(result.n_test == 20);
  CHECK(result.report.weighted_f1 >= 0.9);

  // Fitted state saw the training split only.
  REQUIRE(result.fits.size() == 1);
  CHECK(result.fits[0].n_docs == 180);
  CHECK(result.fits[0].digest == fingerprint("char_tfidf", train_ids).digest);
  CHECK(result.fits[0].digest != fingerprint("char_tfidf", all_ids).digest);

  write_outputs(spec.output_dir, spec, result);
  const std::string first = io::read_file(spec.output_dir / "report.json");
  const std::string model = io::read_file(spec.output_dir / "model.json");
  const auto again = run_experiment(spec);
  write_outputs(spec.output_dir, spec, again);
  CHECK(io::read_file(spec.output_dir / "report.json") == first);
  CHECK(io::read_file(spec.output_dir / "model.json") == model);
  CHECK(std::filesystem::exists(spec.output_dir / "report.txt"));
  CHECK(std::filesystem::exists(spec.output_dir / "timing.json"));

  const auto report = nlohmann::json::parse(first);
  CHECK(report["feature_set"] == "char_tfidf");
  CHECK(report["n_test"] == 20);
  CHECK_FALSE(report.contains("runtime_seconds"));
  CHECK(report["config"]["corpus"] == "corpus.jsonl");
  CHECK(report_text(spec, result).find("weighted F1") != std::string::npos);

  // Document order in the file does not change the report.
  auto shuffled = docs;
  Rng rng(5);
  rng.shuffle(shuffled);
  corpus::write_docs(dir / "corpus.jsonl", shuffled);
  const auto permuted = run_experiment(spec);
  CHECK(report_json(spec, permuted).dump() == report.dump());
}

TEST_CASE("feature building") {
  TempDir dir("features");
  const auto docs = synthetic::aa_corpus(3, 10, 4);
  std::vector<corpus::AuthorDoc> train, test;
  for (const auto& d : docs) (d.split == corpus::Split::train ? train : test).push_back(d);
  corpus::write_docs(dir / "corpus.jsonl", docs);

  std::vector<std::string> ids;
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    ids.push_back(docs[i].doc_id);
    rows.push_back({static_cast<double>(i), 1.0, -1.0});
  }
  embed::write_vectors_jsonl(dir / "emb.jsonl", embed::make_matrix(ids, rows, "emb(3)"));

  auto spec = make_spec(dir, "embedding:emb+stylo+word_tfidf");
  spec.embeddings["emb"] = dir / "emb.jsonl";
  spec.ngrams.vocab_size = 50;
  const auto feats = build_features(spec, train, test);
  CHECK(feats.train.rows.rows() == static_cast<Eigen::Index>(train.size()));
  CHECK(feats.test.rows.rows() == static_cast<Eigen::Index>(test.size()));
  CHECK(feats.train.width() == feats.test.width());
  CHECK(feats.train.feature_spec.rfind("emb(3)+stylo(", 0) == 0);
  CHECK(feats.train.doc_ids.front() == train.front().doc_id);
  CHECK(feats.train.rows(0, 0) == 0.0);
  REQUIRE(feats.fits.size() == 2);
  for (const auto& f : feats.fits) CHECK(f.n_docs == train.size());

  // A vector file missing one test document.
  ids.pop_back();
  rows.pop_back();
  embed::write_vectors_jsonl(dir / "emb.jsonl", embed::make_matrix(ids, rows, "emb(3)"));
  CHECK_THROWS_AS(build_features(spec, train, test), DataError);
}

TEST_CASE("standardization uses training statistics") {
  Eigen::MatrixXd train(3, 2);
  train << 1, 5, 2, 5, 3, 5;
  Eigen::MatrixXd test(1, 2);
  test << 4, 6;
  standardize_columns(train, test);
  CHECK(std::abs(train.col(0).mean()) < 1e-15);
  CHECK(train.col(1).isZero());
  const double sd = std::sqrt(2.0 / 3.0);
  CHECK(std::abs(test(0, 0) - 2.0 / sd) < 1e-12);
  CHECK(test(0, 1) == 1.0);
}

TEST_CASE("summary table") {
  std::vector<nlohmann::json> reports = {
      {{"dataset", "imdb"}, {"feature_set", "stylo"}, {"weighted_f1", 0.5}},
      {{"dataset", "blogs"}, {"feature_set", "char_tfidf"}, {"weighted_f1", 0.876}},
      {{"dataset", "imdb"}, {"feature_set", "char_tfidf"}, {"weighted_f1", 0.9}},
  };
  const std::string expected =
      "| Dataset | char_tfidf | stylo |\n"
      "|---|---|---|\n"
      "| blogs | 0.88 | - |\n"
      "| imdb | 0.90 | 0.50 |\n";
  CHECK(summary_markdown(reports) == expected);
  std::reverse(reports.begin(), reports.end());
  CHECK(summary_markdown(reports) == expected);
  reports.push_back(reports.front());
  CHECK_THROWS_AS(summary_markdown(reports), DataError);
}

TEST_CASE("fingerprints ignore id order") {
  std::vector<std::string> a = {"x", "y", "z"};
  std::vector<std::string> b = {"z", "x", "y"};
  CHECK(fingerprint("c", a).digest == fingerprint("c", b).digest);
  CHECK(fingerprint("c", a).digest.size() == 16);
  std::vector<std::string> c = {"x", "y"};
  CHECK(fingerprint("c", a).digest != fingerprint("c", c).digest);
}

TEST_CASE("multiple seeds") {
  TempDir dir("seeds");
  corpus::write_docs(dir / "corpus.jsonl", synthetic::aa_corpus(3, 12, 8));
  auto spec = make_spec(dir, "word_tfidf");
  spec.seeds = 2;
  spec.train.max_epochs = 5;
  const auto results = run_experiments(spec, true);
  CHECK(results.size() == 2);
  CHECK(std::filesystem::exists(spec.output_dir / "seed-11" / "report.json"));
  CHECK(std::filesystem::exists(spec.output_dir / "seed-12" / "report.json"));
  const auto summary = nlohmann::json::parse(io::read_file(spec.output_dir / "seeds.json"));
  CHECK(summary["runs"].size() == 2);
}
