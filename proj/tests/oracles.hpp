#pragma once

// Brute-force reference implementations used to cross-check the library. Each
// one works from first principles on plain containers and shares no code with
// the implementation it checks.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace oracle {

inline std::vector<std::string> split_spaces(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// ---- TF-IDF ---------------------------------------------------------------
// Inputs are lowercase ASCII words separated by single spaces.

struct Tfidf {
  std::vector<std::string> vocabulary;  // lexicographic
  std::vector<double> idf;
  std::vector<std::vector<double>> rows;  // training docs transformed
};

inline std::vector<std::string> grams_of(const std::string& doc, bool word, int n_min, int n_max,
                                         const std::unordered_set<std::string>* stop) {
  std::vector<std::string> words;
  for (auto& w : split_spaces(doc)) {
    if (stop == nullptr || stop->count(w) == 0) words.push_back(w);
  }
  std::vector<std::string> out;
  if (word) {
    for (int n = n_min; n <= n_max; ++n) {
      for (int i = 0; i + n <= static_cast<int>(words.size()); ++i) {
        std::string g = words[i];
        for (int k = 1; k < n; ++k) g += " " + words[i + k];
        out.push_back(g);
      }
    }
  } else {
    std::string text;
    for (const auto& w : words) text += (text.empty() ? "" : " ") + w;
    for (int n = n_min; n <= n_max; ++n) {
      for (int i = 0; i + n <= static_cast<int>(text.size()); ++i) out.push_back(text.substr(i, n));
    }
  }
  return out;
}

inline std::vector<double> tfidf_row(const std::string& doc, const Tfidf& fit, bool word, int n_min,
                                     int n_max, const std::unordered_set<std::string>* stop) {
  std::vector<double> row(fit.vocabulary.size(), 0.0);
  for (const auto& g : grams_of(doc, word, n_min, n_max, stop)) {
    for (std::size_t j = 0; j < fit.vocabulary.size(); ++j) {
      if (fit.vocabulary[j] == g) row[j] += 1.0;
    }
  }
  double norm = 0.0;
  for (std::size_t j = 0; j < row.size(); ++j) {
    row[j] *= fit.idf[j];
    norm += row[j] * row[j];
  }
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (double& x : row) x /= norm;
  }
  return row;
}

inline Tfidf tfidf(const std::vector<std::string>& docs, bool word, int n_min, int n_max,
                   std::size_t vocab_size, const std::unordered_set<std::string>* stop) {
  std::map<std::string, long> total;
  for (const auto& d : docs) {
    for (const auto& g : grams_of(d, word, n_min, n_max, stop)) total[g] += 1;
  }
  std::vector<std::pair<long, std::string>> ranked;
  for (const auto& [g, c] : total) ranked.emplace_back(-c, g);
  std::sort(ranked.begin(), ranked.end());
  Tfidf fit;
  for (std::size_t i = 0; i < ranked.size() && i < vocab_size; ++i) fit.vocabulary.push_back(ranked[i].second);
  std::sort(fit.vocabulary.begin(), fit.vocabulary.end());
  for (const auto& g : fit.vocabulary) {
    double df = 0.0;
    for (const auto& d : docs) {
      const auto gs = grams_of(d, word, n_min, n_max, stop);
      if (std::find(gs.begin(), gs.end(), g) != gs.end()) df += 1.0;
    }
    fit.idf.push_back(std::log((1.0 + static_cast<double>(docs.size())) / (1.0 + df)) + 1.0);
  }
  for (const auto& d : docs) fit.rows.push_back(tfidf_row(d, fit, word, n_min, n_max, stop));
  return fit;
}

// ---- weighted F1 ------------------------------------------------------------

inline double weighted_f1(const std::vector<std::string>& gold, const std::vector<std::string>& pred) {
  std::set<std::string> classes(gold.begin(), gold.end());
  classes.insert(pred.begin(), pred.end());
  double total = 0.0;
  for (const auto& c : classes) {
    std::size_t tp = 0, n_pred = 0, n_gold = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      if (pred[i] == c) ++n_pred;
      if (gold[i] == c) ++n_gold;
      if (pred[i] == c && gold[i] == c) ++tp;
    }
    const double p = n_pred == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(n_pred);
    const double r = n_gold == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(n_gold);
    const double f = p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
    total += f * static_cast<double>(n_gold);
  }
  return total / static_cast<double>(gold.size());
}

// ---- consistency -------------------------------------------------------------
// human: raw label strings; predicted: positive flag per feature in canonical order.

inline const std::array<std::string, 6>& feature_names() {
  static const std::array<std::string, 6> names = {"metaphor", "simile", "sarcasm",
                                                   "hyperbole", "idiom",  "irony"};
  return names;
}

inline bool consistent(const std::vector<std::string>& human, const std::array<bool, 6>& predicted) {
  const bool literal = std::find(human.begin(), human.end(), "literal") != human.end();
  for (std::size_t f = 0; f < 6; ++f) {
    const std::string& n = feature_names()[f];
    const bool pos = std::find(human.begin(), human.end(), n) != human.end();
    const bool neg = std::find(human.begin(), human.end(), "not_" + n) != human.end();
    if (pos && !predicted[f]) return false;
    if ((neg || (literal && !pos)) && predicted[f]) return false;
  }
  return true;
}

// ---- calibration sweep -------------------------------------------------------
// Returns (threshold, score) maximizing weighted F1 over {positive, negative}
// on the grid k/100, first maximum wins.

inline std::pair<double, double> best_threshold(const std::vector<double>& probs,
                                                const std::vector<bool>& gold) {
  double best_t = 0.0;
  double best = -1.0;
  for (int k = 0; k <= 100; ++k) {
    const double t = static_cast<double>(k) / 100.0;
    std::vector<std::string> g;
    std::vector<std::string> p;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      g.push_back(gold[i] ? "positive" : "negative");
      p.push_back(probs[i] >= t ? "positive" : "negative");
    }
    const double score = weighted_f1(g, p);
    if (score > best) {
      best = score;
      best_t = t;
    }
  }
  return {best_t, best};
}

// ---- lexical statistics from the raw multiset --------------------------------

inline std::map<std::string, long> counts(const std::vector<std::string>& tokens) {
  std::map<std::string, long> c;
  for (const auto& t : tokens) ++c[t];
  return c;
}

inline double yule_k(const std::vector<std::string>& tokens) {
  const double n = static_cast<double>(tokens.size());
  double s2 = 0.0;
  for (const auto& [w, f] : counts(tokens)) s2 += static_cast<double>(f) * static_cast<double>(f);
  return 1e4 * (s2 - n) / (n * n);
}

inline double simpson_d(const std::vector<std::string>& tokens) {
  const double n = static_cast<double>(tokens.size());
  double s = 0.0;
  for (const auto& [w, f] : counts(tokens)) s += static_cast<double>(f) * static_cast<double>(f - 1);
  return s / (n * (n - 1.0));
}

inline double entropy_bits(const std::vector<std::string>& tokens) {
  const double n = static_cast<double>(tokens.size());
  double h = 0.0;
  for (const auto& [w, f] : counts(tokens)) {
    const double p = static_cast<double>(f) / n;
    h -= p * std::log2(p);
  }
  return h;
}

}  // namespace oracle
