#include "figstyle/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>

#include "figstyle/error.hpp"
#include "figstyle/io.hpp"

namespace figstyle::config {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool is_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' || c == ':';
}

bool is_number(std::string_view s) {
  if (s.empty()) return false;
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out);
}

// Parses a double-quoted string starting at s[0]; returns the contents and
// advances pos past the closing quote.
std::string parse_quoted(std::string_view s, std::size_t& pos) {
  std::string out;
  ++pos;
  while (pos < s.size() && s[pos] != '"') {
    char c = s[pos++];
    if (c == '\\' && pos < s.size()) {
      const char esc = s[pos++];
      switch (esc) {
        case 'n': c = '\n'; break;
        case 't': c = '\t'; break;
        case '"': case '\\': c = esc; break;
        default: throw ConfigError(std::string("unsupported escape \\") + esc);
      }
    }
    out += c;
  }
  if (pos >= s.size()) throw ConfigError("unterminated string");
  ++pos;
  return out;
}

// Drops a trailing '#' comment that is not inside a string.
std::string_view strip_comment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '\\' && in_string) {
      ++i;
    } else if (line[i] == '"') {
      in_string = !in_string;
    } else if (line[i] == '#' && !in_string) {
      return line.substr(0, i);
    }
  }
  return line;
}

}  // namespace

Value Value::parse(std::string_view raw, bool allow_bare) {
  const std::string_view s = trim(raw);
  if (s.empty()) throw ConfigError("missing value");
  Value v;
  if (s.front() == '"') {
    std::size_t pos = 0;
    v.scalar = parse_quoted(s, pos);
    if (!trim(s.substr(pos)).empty()) throw ConfigError("trailing characters after string");
    v.kind = Kind::string;
  } else if (s.front() == '[') {
    if (s.back() != ']') throw ConfigError("unterminated list");
    v.kind = Kind::list;
    std::string_view body = trim(s.substr(1, s.size() - 2));
    std::size_t pos = 0;
    while (pos < body.size()) {
      while (pos < body.size() && (body[pos] == ' ' || body[pos] == '\t')) ++pos;
      if (pos >= body.size()) break;
      if (body[pos] != '"') throw ConfigError("list items must be quoted strings");
      v.items.push_back(parse_quoted(body, pos));
      while (pos < body.size() && (body[pos] == ' ' || body[pos] == '\t')) ++pos;
      if (pos < body.size()) {
        if (body[pos] != ',') throw ConfigError("expected ',' between list items");
        ++pos;
      }
    }
  } else if (s == "true" || s == "false") {
    v.kind = Kind::boolean;
    v.scalar = std::string(s);
  } else if (is_number(s)) {
    v.kind = Kind::number;
    v.scalar = std::string(s);
  } else if (allow_bare) {
    v.kind = Kind::string;
    v.scalar = std::string(s);
  } else {
    throw ConfigError("cannot parse value \"" + std::string(s) + "\"");
  }
  return v;
}

std::string env_name(std::string_view key) {
  std::string out = "FIGSTYLE_";
  for (char c : key) {
    out += (c == '.' || c == '-' || c == ':') ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return out;
}

Config Config::parse(std::string_view text, const std::string& source) {
  Config cfg;
  std::string section;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    line = trim(strip_comment(line));
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    try {
      if (line.front() == '[') {
        if (line.back() != ']') throw ConfigError("malformed section header");
        section = std::string(trim(line.substr(1, line.size() - 2)));
        if (section.empty() || !std::all_of(section.begin(), section.end(), is_key_char)) {
          throw ConfigError("malformed section name");
        }
      } else {
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError("expected key = value");
        const std::string key(trim(line.substr(0, eq)));
        if (key.empty() || !std::all_of(key.begin(), key.end(), is_key_char)) {
          throw ConfigError("malformed key \"" + key + "\"");
        }
        const std::string full = section.empty() ? key : section + "." + key;
        if (cfg.values_.contains(full)) throw ConfigError("duplicate key \"" + full + "\"");
        cfg.values_[full] = Value::parse(line.substr(eq + 1), false);
      }
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
    if (end == text.size()) break;
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path.string());
  Config cfg = parse(io::read_file(path), path.string());
  cfg.base_dir_ = path.parent_path();
  return cfg;
}

void Config::set_assignment(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw ConfigError("override must look like key=value");
  const std::string key(trim(assignment.substr(0, eq)));
  if (key.empty()) throw ConfigError("override has an empty key");
  values_[key] = Value::parse(assignment.substr(eq + 1), true);
}

void Config::apply_env(const std::set<std::string>& known, const EnvLookup& lookup) {
  std::set<std::string> keys = known;
  for (const auto& [k, v] : values_) keys.insert(k);
  for (const auto& key : keys) {
    if (auto raw = lookup(env_name(key))) values_[key] = Value::parse(*raw, true);
  }
}

void Config::check_keys(const std::set<std::string>& allowed,
                        std::span<const std::string> prefixes) const {
  for (const auto& [key, v] : values_) {
    if (allowed.contains(key)) continue;
    const bool prefixed = std::any_of(prefixes.begin(), prefixes.end(), [&](const std::string& p) {
      return key.size() > p.size() && key.starts_with(p);
    });
    if (!prefixed) throw ConfigError("unknown config key \"" + key + "\"");
  }
}

const Value& Config::require(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing config key \"" + key + "\"");
  return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  if (!has(key)) return fallback;
  const Value& v = require(key);
  if (v.kind == Value::Kind::list) throw ConfigError("config key \"" + key + "\" must be a string");
  return v.scalar;
}

double Config::get_double(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  const Value& v = require(key);
  if (v.kind != Value::Kind::number) throw ConfigError("config key \"" + key + "\" must be a number");
  double out = 0.0;
  std::from_chars(v.scalar.data(), v.scalar.data() + v.scalar.size(), out);
  return out;
}

long long Config::get_int(const std::string& key, long long fallback) const {
  if (!has(key)) return fallback;
  const Value& v = require(key);
  long long out = 0;
  auto [ptr, ec] = std::from_chars(v.scalar.data(), v.scalar.data() + v.scalar.size(), out);
  if (v.kind != Value::Kind::number || ec != std::errc{} || ptr != v.scalar.data() + v.scalar.size()) {
    throw ConfigError("config key \"" + key + "\" must be an integer");
  }
  return out;
}

std::uint64_t Config::get_uint(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const Value& v = require(key);
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.scalar.data(), v.scalar.data() + v.scalar.size(), out);
  if (v.kind != Value::Kind::number || ec != std::errc{} || ptr != v.scalar.data() + v.scalar.size()) {
    throw ConfigError("config key \"" + key + "\" must be a non-negative integer");
  }
  return out;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const Value& v = require(key);
  if (v.kind != Value::Kind::boolean) throw ConfigError("config key \"" + key + "\" must be true or false");
  return v.scalar == "true";
}

std::vector<std::string> Config::get_list(const std::string& key) const {
  if (!has(key)) return {};
  const Value& v = require(key);
  if (v.kind == Value::Kind::list) return v.items;
  if (v.kind == Value::Kind::string) return {v.scalar};
  throw ConfigError("config key \"" + key + "\" must be a string or list of strings");
}

std::map<std::string, std::string> Config::strings_with_prefix(const std::string& prefix) const {
  std::map<std::string, std::string> out;
  for (const auto& [key, v] : values_) {
    if (key.size() > prefix.size() && key.starts_with(prefix)) {
      out[key.substr(prefix.size())] = get_string(key, "");
    }
  }
  return out;
}

std::filesystem::path Config::get_path(const std::string& key) const {
  std::filesystem::path p = get_string(key, "");
  if (p.empty()) throw ConfigError("missing config key \"" + key + "\"");
  if (p.is_relative() && !base_dir_.empty()) p = base_dir_ / p;
  return p;
}

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (!v) return std::nullopt;
    return std::string(v);
  };
}

}  // namespace figstyle::config
