#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// Key-value run configuration: a flat TOML subset (see docs/config.md).
//
//   # comment
//   corpus = "docs.jsonl"
//   features = ["embedding:mflm", "char_tfidf"]
//   [train]
//   learning_rate = 2e-5
//
// Section headers prefix the keys that follow ("train.learning_rate").
// Overrides apply in the order file < environment (FIGSTYLE_*) < command line.
namespace figstyle::config {

struct Value {
  enum class Kind { string, number, boolean, list };
  Kind kind = Kind::string;
  std::string scalar;              // string contents, number text, or "true"/"false"
  std::vector<std::string> items;  // list of strings

  // Parses a value literal. Bare words are accepted as strings when allow_bare.
  static Value parse(std::string_view raw, bool allow_bare);
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

// FIGSTYLE_ + uppercase key with '.' and '-' mapped to '_'.
std::string env_name(std::string_view key);

class Config {
 public:
  static Config parse(std::string_view text, const std::string& source = "<config>");
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.contains(key); }
  void set(const std::string& key, Value v) { values_[key] = std::move(v); }
  // "key=value" from the command line.
  void set_assignment(std::string_view assignment);
  // Environment overrides for every key in known (and every key already present).
  void apply_env(const std::set<std::string>& known, const EnvLookup& lookup);

  // Throws ConfigError on any key outside allowed and not starting with an allowed prefix.
  void check_keys(const std::set<std::string>& allowed, std::span<const std::string> prefixes) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  // Strings are returned as one-element lists.
  std::vector<std::string> get_list(const std::string& key) const;
  std::map<std::string, std::string> strings_with_prefix(const std::string& prefix) const;

  // Resolves a path value relative to the config file's directory.
  std::filesystem::path get_path(const std::string& key) const;
  const std::filesystem::path& base_dir() const { return base_dir_; }
  void set_base_dir(std::filesystem::path p) { base_dir_ = std::move(p); }

  const std::map<std::string, Value>& values() const { return values_; }

 private:
  const Value& require(const std::string& key) const;

  std::map<std::string, Value> values_;
  std::filesystem::path base_dir_;
};

EnvLookup process_env();

}  // namespace figstyle::config
