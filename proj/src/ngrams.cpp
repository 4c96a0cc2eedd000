#include "figstyle/ngrams.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "figstyle/error.hpp"
#include "figstyle/io.hpp"
#include "figstyle/text.hpp"
#include "figstyle/wordlists.hpp"

namespace figstyle::ngrams {

using io::Json;

std::string_view name(Analyzer a) { return a == Analyzer::word ? "word" : "char"; }

Analyzer analyzer_from_name(std::string_view s) {
  if (s == "word") return Analyzer::word;
  if (s == "char") return Analyzer::character;
  throw ConfigError("analyzer must be word or char, got \"" + std::string(s) + "\"");
}

std::string_view name(StopwordPolicy p) {
  switch (p) {
    case StopwordPolicy::both: return "both";
    case StopwordPolicy::word_only: return "word_only";
    case StopwordPolicy::none: return "none";
  }
  return "both";
}

StopwordPolicy stopword_policy_from_name(std::string_view s) {
  if (s == "both") return StopwordPolicy::both;
  if (s == "word_only") return StopwordPolicy::word_only;
  if (s == "none") return StopwordPolicy::none;
  throw ConfigError("stopword policy must be both, word_only or none, got \"" + std::string(s) +
                    "\"");
}

void NgramConfig::validate() const {
  if (n_min < 1 || n_max < n_min) throw ConfigError("n-gram range must satisfy 1 <= n_min <= n_max");
  if (vocab_size < 1) throw ConfigError("vocabulary size must be at least 1");
}

std::vector<std::string> char_grams(std::string_view text, int n_min, int n_max) {
  const std::u32string cps = text::decode(text);
  std::vector<std::string> out;
  for (int n = n_min; n <= n_max; ++n) {
    const auto len = static_cast<std::size_t>(n);
    if (cps.size() < len) continue;
    for (std::size_t i = 0; i + len <= cps.size(); ++i) {
      out.push_back(text::encode(std::u32string_view(cps).substr(i, len)));
    }
  }
  return out;
}

std::vector<std::string> word_grams(std::span<const std::string> tokens, int n_min, int n_max) {
  std::vector<std::string> out;
  for (int n = n_min; n <= n_max; ++n) {
    const auto len = static_cast<std::size_t>(n);
    if (tokens.size() < len) continue;
    for (std::size_t i = 0; i + len <= tokens.size(); ++i) {
      std::string g = tokens[i];
      for (std::size_t j = 1; j < len; ++j) {
        g += ' ';
        g += tokens[i + j];
      }
      out.push_back(std::move(g));
    }
  }
  return out;
}

std::vector<std::string> word_analyzer_tokens(std::string_view text, bool drop_stopwords) {
  std::vector<std::string> tokens = text::word_tokens(text);
  if (drop_stopwords) {
    const auto& stop = wordlists::stopwords();
    std::erase_if(tokens, [&](const std::string& t) { return stop.contains(t); });
  }
  return tokens;
}

std::string char_analyzer_text(std::string_view raw, bool drop_stopwords) {
  const std::u32string cps = text::decode(text::to_lower(raw));
  const auto& stop = wordlists::stopwords();
  std::string out;
  std::size_t i = 0;
  while (i < cps.size()) {
    while (i < cps.size() && text::is_space(cps[i])) ++i;
    std::size_t j = i;
    while (j < cps.size() && !text::is_space(cps[j])) ++j;
    if (j == i) break;
    std::u32string_view chunk = std::u32string_view(cps).substr(i, j - i);
    bool keep = true;
    if (drop_stopwords) {
      std::size_t b = 0, e = chunk.size();
      while (b < e && !text::is_alnum(chunk[b])) ++b;
      while (e > b && !text::is_alnum(chunk[e - 1])) --e;
      keep = !stop.contains(text::encode(chunk.substr(b, e - b)));
    }
    if (keep) {
      if (!out.empty()) out += ' ';
      out += text::encode(chunk);
    }
    i = j;
  }
  return out;
}

std::vector<std::string> extract_grams(std::string_view text, const NgramConfig& config) {
  if (config.analyzer == Analyzer::word) {
    const bool drop = config.stopwords != StopwordPolicy::none;
    return word_grams(word_analyzer_tokens(text, drop), config.n_min, config.n_max);
  }
  const bool drop = config.stopwords == StopwordPolicy::both;
  return char_grams(char_analyzer_text(text, drop), config.n_min, config.n_max);
}

FittedVectorizer FittedVectorizer::fit(std::span<const std::string> train_texts,
                                       const NgramConfig& config) {
  config.validate();
  if (train_texts.empty()) throw DataError("vectorizer needs at least one training text");

  std::unordered_map<std::string, std::size_t> totals;
  std::vector<std::vector<std::string>> doc_grams;
  doc_grams.reserve(train_texts.size());
  for (const auto& t : train_texts) {
    std::vector<std::string> grams = extract_grams(t, config);
    for (const auto& g : grams) ++totals[g];
    std::sort(grams.begin(), grams.end());
    grams.erase(std::unique(grams.begin(), grams.end()), grams.end());
    doc_grams.push_back(std::move(grams));
  }
  if (totals.empty()) throw DataError("empty vocabulary after filtering");

  std::vector<std::pair<std::string, std::size_t>> ranked(totals.begin(), totals.end());
  const std::size_t keep = std::min(config.vocab_size, ranked.size());
  auto by_freq = [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  };
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep),
                    ranked.end(), by_freq);
  ranked.resize(keep);

  FittedVectorizer v;
  v.config_ = config;
  v.doc_count_ = train_texts.size();
  for (auto& [g, c] : ranked) v.vocabulary_.push_back(g);
  std::sort(v.vocabulary_.begin(), v.vocabulary_.end());
  v.build_index();

  std::vector<std::size_t> df(v.vocabulary_.size(), 0);
  for (const auto& grams : doc_grams) {
    for (const auto& g : grams) {
      auto it = v.index_.find(g);
      if (it != v.index_.end()) ++df[it->second];
    }
  }
  const double D = static_cast<double>(v.doc_count_);
  v.idf_.resize(df.size());
  for (std::size_t i = 0; i < df.size(); ++i) {
    v.idf_[i] = std::log((1.0 + D) / (1.0 + static_cast<double>(df[i]))) + 1.0;
  }
  return v;
}

void FittedVectorizer::build_index() {
  index_.clear();
  for (std::size_t i = 0; i < vocabulary_.size(); ++i) {
    if (!index_.emplace(vocabulary_[i], static_cast<std::uint32_t>(i)).second) {
      throw DataError("duplicate vocabulary entry \"" + vocabulary_[i] + "\"");
    }
  }
}

SparseVector FittedVectorizer::transform(std::string_view text) const {
  std::unordered_map<std::uint32_t, double> counts;
  for (const auto& g : extract_grams(text, config_)) {
    auto it = index_.find(g);
    if (it != index_.end()) counts[it->second] += 1.0;
  }
  SparseVector out(counts.begin(), counts.end());
  std::sort(out.begin(), out.end());
  double norm2 = 0.0;
  for (auto& [i, w] : out) {
    w *= idf_[i];
    norm2 += w * w;
  }
  if (norm2 > 0.0) {
    const double norm = std::sqrt(norm2);
    for (auto& [i, w] : out) w /= norm;
  }
  return out;
}

std::vector<double> FittedVectorizer::transform_dense(std::string_view text) const {
  std::vector<double> dense(vocabulary_.size(), 0.0);
  for (const auto& [i, w] : transform(text)) dense[i] = w;
  return dense;
}

Json FittedVectorizer::to_json() const {
  return Json{{"format", "figstyle-vectorizer-1"},
              {"config",
               {{"analyzer", name(config_.analyzer)},
                {"n_min", config_.n_min},
                {"n_max", config_.n_max},
                {"vocab_size", config_.vocab_size},
                {"stopwords", name(config_.stopwords)}}},
              {"vocabulary", vocabulary_},
              {"idf", idf_},
              {"doc_count", doc_count_}};
}

FittedVectorizer FittedVectorizer::from_json(const Json& j) {
  FittedVectorizer v;
  try {
    const Json& c = io::require(j, "config");
    v.config_.analyzer = analyzer_from_name(io::require_string(c, "analyzer"));
    v.config_.n_min = io::require(c, "n_min").get<int>();
    v.config_.n_max = io::require(c, "n_max").get<int>();
    v.config_.vocab_size = io::require(c, "vocab_size").get<std::size_t>();
    v.config_.stopwords = stopword_policy_from_name(io::require_string(c, "stopwords"));
    v.vocabulary_ = io::require(j, "vocabulary").get<std::vector<std::string>>();
    v.idf_ = io::require(j, "idf").get<std::vector<double>>();
    v.doc_count_ = io::require(j, "doc_count").get<std::size_t>();
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed vectorizer state: ") + e.what());
  } catch (const ConfigError& e) {
    throw DataError(std::string("malformed vectorizer state: ") + e.what());
  }
  v.config_.validate();
  if (v.idf_.size() != v.vocabulary_.size()) throw DataError("idf and vocabulary sizes differ");
  v.build_index();
  return v;
}

}  // namespace figstyle::ngrams
