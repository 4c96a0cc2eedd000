#pragma once

#include <string>
#include <string_view>
#include <vector>

// UTF-8 helpers backed by ICU character properties.
namespace figstyle::text {

// NFC normalization followed by trimming of leading/trailing Unicode whitespace.
// Throws DataError on malformed UTF-8.
std::string normalize(std::string_view raw);

// Full Unicode lowercase mapping.
std::string to_lower(std::string_view s);

// Decodes to code points; throws DataError on malformed UTF-8.
std::u32string decode(std::string_view s);
std::string encode(std::u32string_view cps);
void append_utf8(std::string& out, char32_t cp);

bool is_alnum(char32_t cp);
bool is_digit(char32_t cp);
bool is_upper(char32_t cp);
bool is_punct(char32_t cp);
bool is_space(char32_t cp);
// Apostrophe-like characters allowed inside word tokens.
bool is_apostrophe(char32_t cp);

// Lowercase word tokens: maximal alphanumeric runs with internal apostrophes.
std::vector<std::string> word_tokens(std::string_view s);

}  // namespace figstyle::text
