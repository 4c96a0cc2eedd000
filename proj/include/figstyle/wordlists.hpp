#pragma once

#include <string>
#include <string_view>
#include <unordered_set>

// Bundled lowercase word lists (see assets/ and docs/formulas.md for provenance).
namespace figstyle::wordlists {

using WordSet = std::unordered_set<std::string>;

// 318 English stopwords (scikit-learn's English list).
const WordSet& stopwords();
// 212 closed-class English function words.
const WordSet& function_words();
// 2940-entry Dale-Chall easy-word list (textstat's copy).
const WordSet& easy_words();

inline constexpr std::string_view kVersion = "wordlists-1";

}  // namespace figstyle::wordlists
