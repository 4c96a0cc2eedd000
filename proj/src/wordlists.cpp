#include "figstyle/wordlists.hpp"

#include <sstream>

namespace figstyle::wordlists {

namespace data {
extern const char* const kStopwords;
extern const char* const kFunctionWords;
extern const char* const kEasyWords;
}  // namespace data

namespace {

WordSet parse(const char* raw) {
  WordSet out;
  std::istringstream in(raw);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.insert(line);
  }
  return out;
}

}  // namespace

const WordSet& stopwords() {
  static const WordSet words = parse(data::kStopwords);
  return words;
}

const WordSet& function_words() {
  static const WordSet words = parse(data::kFunctionWords);
  return words;
}

const WordSet& easy_words() {
  static const WordSet words = parse(data::kEasyWords);
  return words;
}

}  // namespace figstyle::wordlists
