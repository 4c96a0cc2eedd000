#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

// Word and character n-gram TF-IDF vectorizers fitted on training text.
namespace figstyle::ngrams {

enum class Analyzer { word, character };
enum class StopwordPolicy { both, word_only, none };

std::string_view name(Analyzer a);
Analyzer analyzer_from_name(std::string_view s);
std::string_view name(StopwordPolicy p);
StopwordPolicy stopword_policy_from_name(std::string_view s);

struct NgramConfig {
  Analyzer analyzer = Analyzer::word;
  int n_min = 1;
  int n_max = 5;
  std::size_t vocab_size = 1024;
  StopwordPolicy stopwords = StopwordPolicy::both;

  void validate() const;  // throws ConfigError
};

// Sliding code-point windows of every length in [n_min, n_max].
std::vector<std::string> char_grams(std::string_view text, int n_min, int n_max);
// Space-joined windows over a token sequence.
std::vector<std::string> word_grams(std::span<const std::string> tokens, int n_min, int n_max);

// Lowercased, stopword-filtered input to the char analyzer: whitespace-delimited
// chunks whose alphanumeric core is a stopword are removed, the rest joined by one space.
std::string char_analyzer_text(std::string_view text, bool drop_stopwords);
// Lowercased word tokens, stopwords optionally removed.
std::vector<std::string> word_analyzer_tokens(std::string_view text, bool drop_stopwords);

// All grams of a document under the config, in extraction order.
std::vector<std::string> extract_grams(std::string_view text, const NgramConfig& config);

using SparseVector = std::vector<std::pair<std::uint32_t, double>>;  // sorted by index

class FittedVectorizer {
 public:
  // Top vocab_size grams by total corpus frequency (ties lexicographic); indices
  // follow lexicographic order; idf(g) = ln((1 + D) / (1 + df(g))) + 1.
  static FittedVectorizer fit(std::span<const std::string> train_texts, const NgramConfig& config);

  // Raw counts x idf, L2-normalized; out-of-vocabulary grams are ignored.
  SparseVector transform(std::string_view text) const;
  std::vector<double> transform_dense(std::string_view text) const;

  const NgramConfig& config() const { return config_; }
  const std::vector<std::string>& vocabulary() const { return vocabulary_; }
  const std::vector<double>& idf() const { return idf_; }
  std::size_t doc_count() const { return doc_count_; }
  std::size_t dimension() const { return vocabulary_.size(); }

  nlohmann::json to_json() const;
  static FittedVectorizer from_json(const nlohmann::json& j);

 private:
  void build_index();

  NgramConfig config_;
  std::vector<std::string> vocabulary_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<double> idf_;
  std::size_t doc_count_ = 0;
};

}  // namespace figstyle::ngrams
