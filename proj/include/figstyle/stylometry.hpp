#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

// Stylometric document features: surface statistics, readability indices, and
// lexical-richness measures over word-frequency spectra. Formulas and constants
// are pinned in docs/formulas.md.
namespace figstyle::stylometry {

struct CharStats {
  std::size_t total = 0;  // non-whitespace code points
  std::size_t uppercase = 0;
  std::size_t digits = 0;
  std::size_t punctuation = 0;
  std::size_t special = 0;  // not alphanumeric, whitespace, or punctuation
};

struct TokenizedDoc {
  std::vector<std::vector<std::string>> sentences;
  std::vector<std::string> tokens;     // lowercase, flattened
  std::vector<std::size_t> letters;    // alphanumeric code points per token
  std::vector<int> syllables;          // per token, each >= 1
  CharStats chars;
};

// Sentences end at '.', '!' or '?' followed by whitespace or end of text; word
// tokens are maximal alphanumeric runs that may contain internal apostrophes.
// Throws DataError when the text has no word tokens.
TokenizedDoc tokenize(std::string_view text);

// Vowel-group heuristic (aeiouy) with a silent terminal 'e'; minimum 1.
int count_syllables(std::string_view word);

class FrequencySpectrum {
 public:
  FrequencySpectrum() = default;
  explicit FrequencySpectrum(std::span<const std::string> tokens);

  std::size_t tokens() const { return tokens_; }  // N
  std::size_t types() const { return types_; }    // V
  // V_i: number of types occurring exactly i times.
  std::size_t count_with_frequency(std::size_t i) const {
    auto it = spectrum_.find(i);
    return it == spectrum_.end() ? 0 : it->second;
  }
  std::size_t hapax() const { return count_with_frequency(1); }
  std::size_t dis() const { return count_with_frequency(2); }
  const std::map<std::size_t, std::size_t>& spectrum() const { return spectrum_; }

 private:
  std::size_t tokens_ = 0;
  std::size_t types_ = 0;
  std::map<std::size_t, std::size_t> spectrum_;
};

FrequencySpectrum frequency_spectrum(std::span<const std::string> tokens);

enum class Metric : std::size_t {
  avg_word_length_chars,
  avg_syllables_per_word,
  avg_sentence_length,
  avg_sentence_length_chars,
  avg_word_frequency_class,
  type_token_ratio,
  digit_ratio,
  punctuation_ratio,
  uppercase_ratio,
  special_characters_ratio,
  stopword_ratio,
  functional_words_ratio,
  hapax_legomena_ratio,
  hapax_dislegomena_ratio,
  automated_readability_index,
  flesch_reading_ease,
  flesch_kincaid_grade,
  dale_chall_readability,
  new_dale_chall_readability,
  spache_readability,
  gunning_fog,
  lix,
  rix,
  fernandez_huerta,
  szigriszt_pazos,
  crawford,
  mcalpine_eflaw,
  guiraud_r,
  herdan_c,
  dugast_k,
  maas_a2,
  dugast_u,
  tuldava_ln,
  brunet_w,
  corrected_type_token_ratio,
  summer_s,
  sichel_s,
  michea_m,
  honore_h,
  shannon_entropy,
  yule_k,
  simpson_d,
  herdan_vm,
  coleman_liau,
  linsear_write,
  smog,
  threshold_word_length_h_ratio,
  threshold_word_length_l_ratio,
  threshold_syllables_per_word_h_ratio,
  threshold_syllables_per_word_l_ratio,
  threshold_sentence_length_h_ratio,
  threshold_sentence_length_l_ratio,
};

inline constexpr std::size_t kMetricCount = 52;

std::string_view name(Metric m);
const std::array<std::string_view, kMetricCount>& metric_names();
bool is_ratio(Metric m);

struct MetricValues {
  std::vector<std::pair<Metric, double>> values;
  std::vector<Metric> guarded;  // metrics that hit a degenerate-input guard

  void put(Metric m, double v) { values.emplace_back(m, v); }
  void guard(Metric m) {
    values.emplace_back(m, 0.0);
    guarded.push_back(m);
  }
  double get(Metric m) const;  // throws std::out_of_range if absent
};

MetricValues compute_surface_and_ratio_metrics(const TokenizedDoc& doc,
                                               const FrequencySpectrum& spectrum);
MetricValues compute_readability_metrics(const TokenizedDoc& doc);
MetricValues compute_lexical_richness_metrics(const FrequencySpectrum& spectrum);

// Token counts from a reference (training) corpus.
class WordFrequencyTable {
 public:
  void add(std::span<const std::string> tokens);
  std::size_t count(const std::string& token) const {
    auto it = counts_.find(token);
    return it == counts_.end() ? 0 : it->second;
  }
  std::size_t max_count() const { return max_; }
  bool empty() const { return counts_.empty(); }
  std::size_t size() const { return counts_.size(); }

 private:
  std::unordered_map<std::string, std::size_t> counts_;
  std::size_t max_ = 0;
};

// Mean over tokens of floor(log2(f(w*) / f(w))), unseen tokens counted with f = 1.
double compute_word_frequency_class(const TokenizedDoc& doc, const WordFrequencyTable& freq);

struct StyloVector {
  std::array<double, kMetricCount> values{};
  std::vector<Metric> guarded;

  double operator[](Metric m) const { return values[static_cast<std::size_t>(m)]; }
};

StyloVector compute_stylo_vector(std::string_view text, const WordFrequencyTable& freq);

}  // namespace figstyle::stylometry
