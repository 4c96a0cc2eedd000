#pragma once

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "figstyle/cli.hpp"
#include "figstyle/corpus.hpp"
#include "figstyle/flpipe.hpp"
#include "figstyle/io.hpp"
#include "synthetic.hpp"

namespace pipeline {

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

inline CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "figstyle");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  CliRun r;
  r.code = figstyle::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

struct Stage {
  std::string name;
  std::vector<std::string> args;
  std::vector<std::string> outputs;  // relative to the work directory
};

// Writes raw FL examples, FL probabilities, AA documents, per-sentence vectors,
// and an experiment config under dir.
inline void write_inputs(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto examples = synthetic::fl_examples(600, 21);
  for (auto& ex : examples) ex.split = figstyle::corpus::Split::train;
  figstyle::corpus::write_examples(dir / "raw_fl.jsonl", examples);

  figstyle::Rng rng(22);
  std::string probs;
  for (const auto& ex : examples) {
    const auto r = synthetic::random_probs(ex.id, rng);
    nlohmann::json p = nlohmann::json::object();
    for (auto f : figstyle::corpus::kFeatures) p[std::string(figstyle::corpus::name(f))] = r[f];
    probs += nlohmann::json{{"id", ex.id}, {"probs", p}}.dump() + "\n";
  }
  figstyle::io::write_file(dir / "probs.jsonl", probs);

  auto docs = synthetic::aa_corpus(4, 12, 23);
  for (auto& d : docs) d.split = figstyle::corpus::Split::train;
  figstyle::corpus::write_docs(dir / "raw_docs.jsonl", docs);

  std::string sentences;
  for (const auto& d : docs) {
    nlohmann::json rows = nlohmann::json::array();
    const std::size_t n = 1 + rng.below(3);
    for (std::size_t i = 0; i < n; ++i) {
      rows.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
    }
    sentences += nlohmann::json{{"id", d.doc_id}, {"sentences", rows}}.dump() + "\n";
  }
  figstyle::io::write_file(dir / "sentences.jsonl", sentences);

  figstyle::io::write_file(dir / "exp.toml",
                           "name = \"pipeline\"\n"
                           "dataset = \"synthetic\"\n"
                           "corpus = \"docs_split.jsonl\"\n"
                           "features = [\"word_tfidf\", \"stylo\"]\n"
                           "seed = 5\n"
                           "[ngrams]\n"
                           "vocab_size = 300\n"
                           "[train]\n"
                           "learning_rate = 0.001\n"
                           "hidden_units = 32\n"
                           "max_epochs = 50\n");
}

// Every CLI stage, in dependency order, with the files each one writes.
inline std::vector<Stage> stages(const std::filesystem::path& dir) {
  auto p = [&](const std::string& name) { return (dir / name).string(); };
  std::vector<std::string> binsets;
  for (auto f : figstyle::corpus::kFeatures) binsets.push_back("binsets/" + std::string(figstyle::corpus::name(f)) + ".jsonl");
  binsets.push_back("binsets/plans.json");
  return {
      {"ingest (fl)", {"ingest", "--kind", "fl", "--input", p("raw_fl.jsonl"), "--out", p("fl.jsonl")}, {"fl.jsonl"}},
      {"split (fl)",
       {"split", "--kind", "fl", "--input", p("fl.jsonl"), "--out", p("fl_split.jsonl"), "--seed", "3"},
       {"fl_split.jsonl"}},
      {"build-binary-sets",
       {"build-binary-sets", "--input", p("fl_split.jsonl"), "--out-dir", p("binsets"), "--seed", "3"},
       binsets},
      {"build-multilabel",
       {"build-multilabel", "--input", p("fl_split.jsonl"), "--predictions", p("probs.jsonl"), "--out",
        p("multilabel.jsonl")},
       {"multilabel.jsonl"}},
      {"calibrate",
       {"calibrate", "--dev", p("probs.jsonl"), "--ref", p("fl_split.jsonl"), "--source", "human", "--out",
        p("thresholds.json"), "--curves", p("curves.json")},
       {"thresholds.json", "curves.json"}},
      {"apply-thresholds",
       {"apply-thresholds", "--predictions", p("probs.jsonl"), "--thresholds", p("thresholds.json"), "--out",
        p("assignments.jsonl")},
       {"assignments.jsonl"}},
      {"score-fl",
       {"score-fl", "--test", p("fl_split.jsonl"), "--assignments", p("assignments.jsonl"), "--mode", "per-task",
        "--out", p("fl_score.json")},
       {"fl_score.json"}},
      {"ingest (aa)", {"ingest", "--kind", "aa", "--input", p("raw_docs.jsonl"), "--out", p("docs.jsonl")}, {"docs.jsonl"}},
      {"split (aa)",
       {"split", "--kind", "aa", "--input", p("docs.jsonl"), "--out", p("docs_split.jsonl"), "--test-fraction",
        "0.25", "--seed", "4"},
       {"docs_split.jsonl"}},
      {"stylo", {"stylo", "--input", p("docs_split.jsonl"), "--out", p("stylo.jsonl")}, {"stylo.jsonl"}},
      {"fit-ngrams",
       {"fit-ngrams", "--input", p("docs_split.jsonl"), "--out", p("char.json"), "--analyzer", "char",
        "--vocab-size", "200"},
       {"char.json"}},
      {"vectorize",
       {"vectorize", "--vectorizer", p("char.json"), "--input", p("docs_split.jsonl"), "--out", p("char.fsvb"),
        "--binary"},
       {"char.fsvb"}},
      {"pool", {"pool", "--input", p("sentences.jsonl"), "--out", p("pooled.jsonl"), "--dim", "4"}, {"pooled.jsonl"}},
      {"concat",
       {"concat", "--input", p("stylo.jsonl"), p("char.fsvb"), p("pooled.jsonl"), "--out", p("features.jsonl")},
       {"features.jsonl"}},
      {"train-mlp",
       {"train-mlp", "--vectors", p("features.jsonl"), "--docs", p("docs_split.jsonl"), "--out", p("model.json"),
        "--hidden-units", "16", "--max-epochs", "30", "--learning-rate", "0.001", "--seed", "2"},
       {"model.json"}},
      {"evaluate",
       {"evaluate", "--model", p("model.json"), "--vectors", p("features.jsonl"), "--docs", p("docs_split.jsonl"),
        "--out", p("evaluation.json")},
       {"evaluation.json"}},
      {"run-experiment",
       {"run-experiment", "--config", p("exp.toml"), "--output-dir", p("experiment")},
       {"experiment/report.json", "experiment/report.txt", "experiment/model.json"}},
      {"report", {"report", p("experiment"), "--out", p("summary.md")}, {"summary.md"}},
  };
}

}  // namespace pipeline
