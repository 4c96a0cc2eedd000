#include "figstyle/stylometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "figstyle/error.hpp"
#include "figstyle/text.hpp"
#include "figstyle/wordlists.hpp"

namespace figstyle::stylometry {

namespace {

constexpr std::array<std::string_view, kMetricCount> kNames = {
    "avg_word_length_chars",
    "avg_syllables_per_word",
    "avg_sentence_length",
    "avg_sentence_length_chars",
    "avg_word_frequency_class",
    "type_token_ratio",
    "digit_ratio",
    "punctuation_ratio",
    "uppercase_ratio",
    "special_characters_ratio",
    "stopword_ratio",
    "functional_words_ratio",
    "hapax_legomena_ratio",
    "hapax_dislegomena_ratio",
    "automated_readability_index",
    "flesch_reading_ease",
    "flesch_kincaid_grade",
    "dale_chall_readability",
    "new_dale_chall_readability",
    "spache_readability",
    "gunning_fog",
    "lix",
    "rix",
    "fernandez_huerta",
    "szigriszt_pazos",
    "crawford",
    "mcalpine_eflaw",
    "guiraud_r",
    "herdan_c",
    "dugast_k",
    "maas_a2",
    "dugast_u",
    "tuldava_ln",
    "brunet_w",
    "corrected_type_token_ratio",
    "summer_s",
    "sichel_s",
    "michea_m",
    "honore_h",
    "shannon_entropy",
    "yule_k",
    "simpson_d",
    "herdan_vm",
    "coleman_liau",
    "linsear_write",
    "smog",
    "threshold_word_length_h_ratio",
    "threshold_word_length_l_ratio",
    "threshold_syllables_per_word_h_ratio",
    "threshold_syllables_per_word_l_ratio",
    "threshold_sentence_length_h_ratio",
    "threshold_sentence_length_l_ratio",
};

bool is_terminal(char32_t cp) { return cp == U'.' || cp == U'!' || cp == U'?'; }

bool is_vowel(char c) {
  switch (c) {
    case 'a': case 'e': case 'i': case 'o': case 'u': case 'y': return true;
    default: return false;
  }
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::string_view name(Metric m) { return kNames[static_cast<std::size_t>(m)]; }

const std::array<std::string_view, kMetricCount>& metric_names() { return kNames; }

bool is_ratio(Metric m) {
  switch (m) {
    case Metric::type_token_ratio:
    case Metric::digit_ratio:
    case Metric::punctuation_ratio:
    case Metric::uppercase_ratio:
    case Metric::special_characters_ratio:
    case Metric::stopword_ratio:
    case Metric::functional_words_ratio:
    case Metric::hapax_legomena_ratio:
    case Metric::hapax_dislegomena_ratio:
    case Metric::sichel_s:
    case Metric::threshold_word_length_h_ratio:
    case Metric::threshold_word_length_l_ratio:
    case Metric::threshold_syllables_per_word_h_ratio:
    case Metric::threshold_syllables_per_word_l_ratio:
    case Metric::threshold_sentence_length_h_ratio:
    case Metric::threshold_sentence_length_l_ratio:
      return true;
    default:
      return false;
  }
}

double MetricValues::get(Metric m) const {
  for (const auto& [k, v] : values) {
    if (k == m) return v;
  }
  throw std::out_of_range("metric not computed: " + std::string(name(m)));
}

int count_syllables(std::string_view word) {
  int groups = 0;
  bool prev_vowel = false;
  for (char c : word) {
    const bool v = is_vowel(c);
    if (v && !prev_vowel) ++groups;
    prev_vowel = v;
  }
  const std::size_t n = word.size();
  if (groups > 1 && n >= 2 && word[n - 1] == 'e' && !is_vowel(word[n - 2])) --groups;
  return std::max(groups, 1);
}

TokenizedDoc tokenize(std::string_view raw) {
  const std::u32string cps = text::decode(raw);
  TokenizedDoc doc;

  for (char32_t cp : cps) {
    if (text::is_space(cp)) continue;
    ++doc.chars.total;
    if (text::is_upper(cp)) ++doc.chars.uppercase;
    if (text::is_digit(cp)) ++doc.chars.digits;
    const bool alnum = text::is_alnum(cp);
    const bool punct = text::is_punct(cp);
    if (punct) ++doc.chars.punctuation;
    if (!alnum && !punct) ++doc.chars.special;
  }

  std::vector<std::string> sentence;
  auto close_sentence = [&] {
    if (!sentence.empty()) doc.sentences.push_back(std::move(sentence));
    sentence.clear();
  };

  const std::size_t n = cps.size();
  std::size_t i = 0;
  while (i < n) {
    const char32_t cp = cps[i];
    if (text::is_alnum(cp)) {
      std::u32string token;
      std::size_t letters = 0;
      while (i < n) {
        if (text::is_alnum(cps[i])) {
          token.push_back(cps[i]);
          ++letters;
          ++i;
        } else if (text::is_apostrophe(cps[i]) && i + 1 < n && text::is_alnum(cps[i + 1])) {
          token.push_back(cps[i]);
          ++i;
        } else {
          break;
        }
      }
      std::string lowered = text::to_lower(text::encode(token));
      doc.syllables.push_back(count_syllables(lowered));
      doc.letters.push_back(letters);
      doc.tokens.push_back(lowered);
      sentence.push_back(std::move(lowered));
      continue;
    }
    if (is_terminal(cp) && (i + 1 == n || text::is_space(cps[i + 1]))) close_sentence();
    ++i;
  }
  close_sentence();

  if (doc.tokens.empty()) throw DataError("text contains no word tokens");
  return doc;
}

FrequencySpectrum::FrequencySpectrum(std::span<const std::string> tokens) {
  std::unordered_map<std::string_view, std::size_t> counts;
  for (const auto& t : tokens) ++counts[t];
  tokens_ = tokens.size();
  types_ = counts.size();
  for (const auto& [tok, c] : counts) ++spectrum_[c];
}

FrequencySpectrum frequency_spectrum(std::span<const std::string> tokens) {
  return FrequencySpectrum(tokens);
}

MetricValues compute_surface_and_ratio_metrics(const TokenizedDoc& doc,
                                               const FrequencySpectrum& spectrum) {
  if (doc.sentences.empty()) throw DataError("document has no sentences");
  const std::size_t words = doc.tokens.size();
  const std::size_t sentences = doc.sentences.size();
  std::size_t letters = 0, syllables = 0;
  std::size_t long_words = 0, poly = 0, stop = 0, functional = 0;
  for (std::size_t i = 0; i < words; ++i) {
    letters += doc.letters[i];
    syllables += static_cast<std::size_t>(doc.syllables[i]);
    if (doc.letters[i] > 5) ++long_words;
    if (doc.syllables[i] > 2) ++poly;
    if (wordlists::stopwords().contains(doc.tokens[i])) ++stop;
    if (wordlists::function_words().contains(doc.tokens[i])) ++functional;
  }
  std::size_t long_sentences = 0;
  for (const auto& s : doc.sentences) {
    if (s.size() > 17) ++long_sentences;
  }

  MetricValues out;
  out.put(Metric::avg_word_length_chars, ratio(letters, words));
  out.put(Metric::avg_syllables_per_word, ratio(syllables, words));
  out.put(Metric::avg_sentence_length, ratio(words, sentences));
  out.put(Metric::avg_sentence_length_chars, ratio(doc.chars.total, sentences));
  out.put(Metric::type_token_ratio, ratio(spectrum.types(), spectrum.tokens()));
  out.put(Metric::digit_ratio, ratio(doc.chars.digits, doc.chars.total));
  out.put(Metric::punctuation_ratio, ratio(doc.chars.punctuation, doc.chars.total));
  out.put(Metric::uppercase_ratio, ratio(doc.chars.uppercase, doc.chars.total));
  out.put(Metric::special_characters_ratio, ratio(doc.chars.special, doc.chars.total));
  out.put(Metric::stopword_ratio, ratio(stop, words));
  out.put(Metric::functional_words_ratio, ratio(functional, words));
  out.put(Metric::hapax_legomena_ratio, ratio(spectrum.hapax(), spectrum.tokens()));
  out.put(Metric::hapax_dislegomena_ratio, ratio(spectrum.dis(), spectrum.tokens()));
  out.put(Metric::threshold_word_length_h_ratio, ratio(long_words, words));
  out.put(Metric::threshold_word_length_l_ratio, ratio(words - long_words, words));
  out.put(Metric::threshold_syllables_per_word_h_ratio, ratio(poly, words));
  out.put(Metric::threshold_syllables_per_word_l_ratio, ratio(words - poly, words));
  out.put(Metric::threshold_sentence_length_h_ratio, ratio(long_sentences, sentences));
  out.put(Metric::threshold_sentence_length_l_ratio, ratio(sentences - long_sentences, sentences));
  return out;
}

MetricValues compute_readability_metrics(const TokenizedDoc& doc) {
  if (doc.sentences.empty() || doc.tokens.empty()) {
    throw DataError("readability needs at least one sentence and one word");
  }
  const double W = static_cast<double>(doc.tokens.size());
  const double S = static_cast<double>(doc.sentences.size());
  double letters = 0, syllables = 0;
  double long_words = 0, complex_words = 0, difficult = 0, mini = 0, easy_lw = 0;
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    letters += static_cast<double>(doc.letters[i]);
    syllables += doc.syllables[i];
    if (doc.letters[i] > 6) long_words += 1;
    if (doc.letters[i] <= 3) mini += 1;
    if (doc.syllables[i] >= 3) complex_words += 1;
    else easy_lw += 1;
    if (!wordlists::easy_words().contains(doc.tokens[i])) difficult += 1;
  }
  const double wps = W / S;            // words per sentence
  const double spw = syllables / W;    // syllables per word
  const double lpw = letters / W;      // letters per word
  const double pdw = 100.0 * difficult / W;
  const double sentences_per_100 = 100.0 * S / W;
  const double syllables_per_100 = 100.0 * syllables / W;

  MetricValues out;
  out.put(Metric::automated_readability_index, 4.71 * lpw + 0.5 * wps - 21.43);
  out.put(Metric::flesch_reading_ease, 206.835 - 1.015 * wps - 84.6 * spw);
  out.put(Metric::flesch_kincaid_grade, 0.39 * wps + 11.8 * spw - 15.59);
  out.put(Metric::dale_chall_readability,
          0.1579 * pdw + 0.0496 * wps + (pdw > 5.0 ? 3.6365 : 0.0));
  out.put(Metric::new_dale_chall_readability, 64.0 - 0.95 * pdw - 0.69 * wps);
  out.put(Metric::spache_readability, 0.141 * wps + 0.086 * pdw + 0.839);
  out.put(Metric::gunning_fog, 0.4 * (wps + 100.0 * complex_words / W));
  out.put(Metric::lix, wps + 100.0 * long_words / W);
  out.put(Metric::rix, long_words / S);
  out.put(Metric::fernandez_huerta, 206.84 - 0.60 * syllables_per_100 - 1.02 * sentences_per_100);
  out.put(Metric::szigriszt_pazos, 206.835 - 62.3 * spw - wps);
  out.put(Metric::crawford, -0.205 * sentences_per_100 + 0.049 * syllables_per_100 - 3.407);
  out.put(Metric::mcalpine_eflaw, (W + mini) / S);
  out.put(Metric::coleman_liau, 0.0588 * (100.0 * lpw) - 0.296 * sentences_per_100 - 15.8);
  const double lw = (easy_lw + 3.0 * complex_words) / S;
  out.put(Metric::linsear_write, lw > 20.0 ? lw / 2.0 : (lw - 2.0) / 2.0);
  out.put(Metric::smog, 1.0430 * std::sqrt(complex_words * 30.0 / S) + 3.1291);
  return out;
}

MetricValues compute_lexical_richness_metrics(const FrequencySpectrum& spectrum) {
  const double N = static_cast<double>(spectrum.tokens());
  const double V = static_cast<double>(spectrum.types());
  const double V1 = static_cast<double>(spectrum.hapax());
  const double V2 = static_cast<double>(spectrum.dis());
  if (spectrum.tokens() == 0) throw DataError("empty frequency spectrum");
  const double lnN = std::log(N);
  const double lnV = std::log(V);
  const bool single = spectrum.tokens() < 2;

  double sum_sq = 0.0;       // sum_i V_i * i^2
  double simpson = 0.0;
  double entropy = 0.0;
  double sum_p2 = 0.0;       // sum_i V_i * (i/N)^2
  for (const auto& [i_raw, vi_raw] : spectrum.spectrum()) {
    const double i = static_cast<double>(i_raw);
    const double vi = static_cast<double>(vi_raw);
    const double p = i / N;
    sum_sq += vi * i * i;
    sum_p2 += vi * p * p;
    entropy -= vi * p * std::log2(p);
    if (!single) simpson += vi * p * ((i - 1.0) / (N - 1.0));
  }

  MetricValues out;
  out.put(Metric::guiraud_r, V / std::sqrt(N));
  if (single) out.guard(Metric::herdan_c); else out.put(Metric::herdan_c, lnV / lnN);
  if (single) out.guard(Metric::dugast_k); else out.put(Metric::dugast_k, lnV / std::log(lnN));
  if (single) out.guard(Metric::maas_a2); else out.put(Metric::maas_a2, (lnN - lnV) / (lnN * lnN));
  if (single || spectrum.types() == spectrum.tokens()) {
    out.guard(Metric::dugast_u);
  } else {
    out.put(Metric::dugast_u, (lnN * lnN) / (lnN - lnV));
  }
  if (single) {
    out.guard(Metric::tuldava_ln);
  } else {
    out.put(Metric::tuldava_ln, (1.0 - V * V) / (V * V * lnN));
  }
  out.put(Metric::brunet_w, std::pow(N, std::pow(V, -0.165)));
  out.put(Metric::corrected_type_token_ratio, V / std::sqrt(2.0 * N));
  if (single || spectrum.types() < 2) {
    out.guard(Metric::summer_s);
  } else {
    out.put(Metric::summer_s, std::log(lnV) / std::log(lnN));
  }
  out.put(Metric::sichel_s, V2 / V);
  if (spectrum.dis() == 0) out.guard(Metric::michea_m); else out.put(Metric::michea_m, V / V2);
  if (single || spectrum.hapax() == spectrum.types()) {
    out.guard(Metric::honore_h);
  } else {
    out.put(Metric::honore_h, 100.0 * lnN / (1.0 - V1 / V));
  }
  out.put(Metric::shannon_entropy, entropy);
  out.put(Metric::yule_k, 1e4 * (sum_sq - N) / (N * N));
  if (single) out.guard(Metric::simpson_d); else out.put(Metric::simpson_d, simpson);
  out.put(Metric::herdan_vm, std::sqrt(std::max(0.0, sum_p2 - 1.0 / V)));
  return out;
}

void WordFrequencyTable::add(std::span<const std::string> tokens) {
  for (const auto& t : tokens) {
    const std::size_t c = ++counts_[t];
    max_ = std::max(max_, c);
  }
}

double compute_word_frequency_class(const TokenizedDoc& doc, const WordFrequencyTable& freq) {
  if (freq.empty()) throw DataError("word frequency table is empty");
  if (doc.tokens.empty()) throw DataError("document has no tokens");
  const std::size_t top = freq.max_count();
  double total = 0.0;
  for (const auto& t : doc.tokens) {
    std::size_t f = std::max<std::size_t>(freq.count(t), 1);
    // floor(log2(top / f)) in exact integer arithmetic
    int cls = 0;
    while ((f << 1) <= top) {
      f <<= 1;
      ++cls;
    }
    total += cls;
  }
  return total / static_cast<double>(doc.tokens.size());
}

StyloVector compute_stylo_vector(std::string_view text, const WordFrequencyTable& freq) {
  const TokenizedDoc doc = tokenize(text);
  const FrequencySpectrum spectrum(doc.tokens);
  StyloVector out;
  std::array<bool, kMetricCount> filled{};
  auto absorb = [&](const MetricValues& mv) {
    for (const auto& [m, v] : mv.values) {
      out.values[static_cast<std::size_t>(m)] = v;
      filled[static_cast<std::size_t>(m)] = true;
    }
    out.guarded.insert(out.guarded.end(), mv.guarded.begin(), mv.guarded.end());
  };
  absorb(compute_surface_and_ratio_metrics(doc, spectrum));
  absorb(compute_readability_metrics(doc));
  absorb(compute_lexical_richness_metrics(spectrum));
  out.values[static_cast<std::size_t>(Metric::avg_word_frequency_class)] =
      compute_word_frequency_class(doc, freq);
  filled[static_cast<std::size_t>(Metric::avg_word_frequency_class)] = true;
  for (std::size_t i = 0; i < kMetricCount; ++i) {
    if (!filled[i]) throw Error("stylometric slot not filled: " + std::string(kNames[i]));
    if (!std::isfinite(out.values[i])) {
      throw Error("non-finite stylometric value for " + std::string(kNames[i]));
    }
  }
  return out;
}

}  // namespace figstyle::stylometry
