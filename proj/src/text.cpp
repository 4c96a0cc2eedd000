#include "figstyle/text.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "figstyle/error.hpp"

namespace figstyle::text {

std::u32string decode(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  const auto* bytes = reinterpret_cast<const uint8_t*>(s.data());
  const auto length = static_cast<int32_t>(s.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 cp = 0;
    U8_NEXT(bytes, i, length, cp);
    if (cp < 0) throw DataError("malformed UTF-8 at byte " + std::to_string(i));
    out.push_back(static_cast<char32_t>(cp));
  }
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
  uint8_t buf[U8_MAX_LENGTH];
  int32_t len = 0;
  UBool error = false;
  U8_APPEND(buf, len, U8_MAX_LENGTH, static_cast<UChar32>(cp), error);
  if (error) throw DataError("invalid code point");
  out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(len));
}

std::string encode(std::u32string_view cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t cp : cps) append_utf8(out, cp);
  return out;
}

std::string normalize(std::string_view raw) {
  decode(raw);  // validates
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error("ICU NFC normalizer unavailable");
  icu::UnicodeString us = icu::UnicodeString::fromUTF8(
      icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size())));
  icu::UnicodeString normalized = nfc->normalize(us, status);
  if (U_FAILURE(status)) throw DataError("NFC normalization failed");
  std::string utf8;
  normalized.toUTF8String(utf8);

  std::u32string cps = decode(utf8);
  std::size_t begin = 0;
  std::size_t end = cps.size();
  while (begin < end && is_space(cps[begin])) ++begin;
  while (end > begin && is_space(cps[end - 1])) --end;
  return encode(std::u32string_view(cps).substr(begin, end - begin));
}

std::string to_lower(std::string_view s) {
  icu::UnicodeString us =
      icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  us.toLower(icu::Locale::getRoot());
  std::string out;
  us.toUTF8String(out);
  return out;
}

bool is_alnum(char32_t cp) { return u_isalnum(static_cast<UChar32>(cp)); }
bool is_digit(char32_t cp) { return u_isdigit(static_cast<UChar32>(cp)); }
bool is_upper(char32_t cp) { return u_isUUppercase(static_cast<UChar32>(cp)); }
bool is_punct(char32_t cp) { return u_ispunct(static_cast<UChar32>(cp)); }
bool is_space(char32_t cp) { return u_isUWhiteSpace(static_cast<UChar32>(cp)); }
bool is_apostrophe(char32_t cp) { return cp == U'\'' || cp == U'’'; }

std::vector<std::string> word_tokens(std::string_view s) {
  const std::u32string cps = decode(s);
  std::vector<std::string> out;
  std::u32string token;
  const std::size_t n = cps.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (is_alnum(cps[i])) {
      token.push_back(cps[i]);
    } else if (!token.empty() && is_apostrophe(cps[i]) && i + 1 < n && is_alnum(cps[i + 1])) {
      token.push_back(cps[i]);
    } else if (!token.empty()) {
      out.push_back(to_lower(encode(token)));
      token.clear();
    }
  }
  if (!token.empty()) out.push_back(to_lower(encode(token)));
  return out;
}

}  // namespace figstyle::text
