#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "figstyle/config.hpp"
#include "figstyle/corpus.hpp"
#include "figstyle/embed.hpp"
#include "figstyle/metrics.hpp"
#include "figstyle/mlp.hpp"
#include "figstyle/ngrams.hpp"

// Authorship-attribution experiments: feature extraction fitted on the training
// split, MLP training, and evaluation on the test split.
namespace figstyle::harness {

enum class ComponentKind { stylo, word_tfidf, char_tfidf, embedding };

struct FeatureComponent {
  ComponentKind kind = ComponentKind::stylo;
  std::string embedding;  // vector-file name for embedding components

  std::string label() const;  // "stylo", "char_tfidf", "embedding:<name>"
  bool operator==(const FeatureComponent&) const = default;
};

// Parses "embedding:mflm+char_tfidf". Throws ConfigError.
std::vector<FeatureComponent> parse_feature_set(std::string_view spec);
std::string feature_set_label(std::span<const FeatureComponent> components);

struct ExperimentSpec {
  std::string name;
  std::string dataset;  // row label in summaries; defaults to the corpus file stem
  std::filesystem::path corpus;
  std::vector<FeatureComponent> features;
  std::map<std::string, std::filesystem::path> embeddings;
  ngrams::NgramConfig ngrams;  // analyzer is set per component
  mlp::TrainConfig train;
  std::uint64_t seed = 0;
  std::size_t seeds = 1;
  bool standardize = false;
  std::filesystem::path output_dir;

  // Throws ConfigError; checks that referenced files exist.
  void validate() const;
  nlohmann::json to_json() const;
};

// Keys accepted in an experiment config ("embeddings." is a free prefix).
const std::set<std::string>& experiment_keys();
ExperimentSpec spec_from_config(const config::Config& cfg);

// Records what a fitted component saw: sorted training ids hashed with FNV-1a.
struct FitFingerprint {
  std::string component;
  std::size_t n_docs = 0;
  std::string digest;  // 16 hex digits

  nlohmann::json to_json() const;
};

FitFingerprint fingerprint(std::string component, std::span<const std::string> ids);

struct FeatureSplit {
  embed::FeatureMatrix train;
  embed::FeatureMatrix test;
  std::vector<FitFingerprint> fits;
};

// Builds and concatenates every component. Fitted state (word frequencies,
// vocabularies) only ever sees train; test docs are transformed afterwards.
FeatureSplit build_features(const ExperimentSpec& spec, std::span<const corpus::AuthorDoc> train,
                            std::span<const corpus::AuthorDoc> test);

// Z-scores columns with train statistics; constant columns are only centered.
void standardize_columns(Eigen::MatrixXd& train, Eigen::MatrixXd& test);

struct ExperimentResult {
  EvalReport report;
  mlp::MlpModel model;
  std::vector<FitFingerprint> fits;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
};

using ProgressFn = std::function<void(const std::string&)>;

ExperimentResult run_experiment(const ExperimentSpec& spec, const ProgressFn& progress = {});

// Full report document: evaluation, config echo, fit fingerprints, training summary.
nlohmann::json report_json(const ExperimentSpec& spec, const ExperimentResult& result);
std::string report_text(const ExperimentSpec& spec, const ExperimentResult& result);

// Writes report.json, report.txt, model.json, and timing.json under dir.
void write_outputs(const std::filesystem::path& dir, const ExperimentSpec& spec,
                   const ExperimentResult& result);

// One experiment per seed (spec.seed, spec.seed + 1, ...). With more than one seed
// each run goes to <output_dir>/seed-<s> and seeds.json summarizes the spread.
std::vector<ExperimentResult> run_experiments(const ExperimentSpec& spec, bool write,
                                              const ProgressFn& progress = {});

// Markdown matrix: one row per dataset, one column per feature set, weighted F1 cells.
std::string summary_markdown(std::span<const nlohmann::json> reports);

}  // namespace figstyle::harness
