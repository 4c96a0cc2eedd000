#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace figstyle::corpus {

// The six figurative-language features. The set is closed.
enum class Feature : std::uint8_t { metaphor, simile, sarcasm, hyperbole, idiom, irony };

inline constexpr std::size_t kFeatureCount = 6;
inline constexpr std::array<Feature, kFeatureCount> kFeatures = {
    Feature::metaphor, Feature::simile, Feature::sarcasm,
    Feature::hyperbole, Feature::idiom, Feature::irony};

std::string_view name(Feature f);
std::optional<Feature> parse_feature(std::string_view s);
// Like parse_feature but unknown names are a DataError.
Feature feature_from_name(std::string_view s);

inline std::size_t index(Feature f) { return static_cast<std::size_t>(f); }

enum class Assertion : std::uint8_t { unknown, positive, negative };

enum class Split : std::uint8_t { train, test };
std::string_view name(Split s);
Split split_from_name(std::string_view s);

// Per-feature tri-state labels plus the literal flag.
// Invariants: literal excludes any positive; one assertion per feature.
class LabelAssertions {
 public:
  Assertion get(Feature f) const { return state_[index(f)]; }
  // Literal expands to negative for every feature not otherwise asserted.
  Assertion effective(Feature f) const {
    if (literal_ && state_[index(f)] == Assertion::unknown) return Assertion::negative;
    return state_[index(f)];
  }
  bool literal() const { return literal_; }
  bool empty() const;

  // Throws DataError when the assertion conflicts with an existing one.
  void set(Feature f, Assertion a);
  void set_literal();

  // Canonical label strings: positives, then not_* negatives, then "literal".
  std::vector<std::string> label_names() const;
  // Sorted label set joined with '|'; used as the stratum key.
  std::string signature() const;

  bool operator==(const LabelAssertions&) const = default;

 private:
  std::array<Assertion, kFeatureCount> state_{};
  bool literal_ = false;
};

struct Example {
  std::string id;
  std::string dataset;
  Split split = Split::train;
  std::string text;
  LabelAssertions labels;
};

struct AuthorDoc {
  std::string doc_id;
  std::string author;
  Split split = Split::train;
  std::string text;
};

struct FlLoadResult {
  std::vector<Example> examples;
  std::size_t dropped_labels = 0;
  std::map<std::string, std::size_t> dropped_by_name;
};

// Parses one examples.jsonl record. Out-of-scope label strings are appended to dropped.
Example parse_example(const nlohmann::json& record, std::vector<std::string>& dropped);
nlohmann::json to_json(const Example& ex);

FlLoadResult load_fl_collection(std::span<const std::filesystem::path> paths);
void write_examples(const std::filesystem::path& path, std::span<const Example> examples);

struct AaLoadResult {
  std::vector<AuthorDoc> docs;
  // author -> (train count, test count)
  std::map<std::string, std::pair<std::size_t, std::size_t>> histogram;
};

AuthorDoc parse_doc(const nlohmann::json& record);
nlohmann::json to_json(const AuthorDoc& doc);
AaLoadResult load_aa_corpus(const std::filesystem::path& path);
// Closed-set check: every test author has training documents. Throws DataError.
void check_closed_set(std::span<const AuthorDoc> docs);
void write_docs(const std::filesystem::path& path, std::span<const AuthorDoc> docs);

// Stratified assignment over arbitrary stratum keys. Per stratum of size s the
// test side receives round_half_up(s * fraction) items clamped to [1, s-1];
// singleton strata stay in train and produce a warning.
struct Assignment {
  std::vector<bool> is_test;
  std::vector<std::string> warnings;
};
Assignment stratified_assign(std::span<const std::string> strata, double test_fraction,
                             std::uint64_t seed);

template <typename T>
struct SplitResult {
  std::vector<T> train;
  std::vector<T> test;
  std::vector<std::string> warnings;
};

// Strata are label signatures; output items carry their new split value.
SplitResult<Example> stratified_split(std::span<const Example> examples, double test_fraction,
                                      std::uint64_t seed);
// Strata are authors.
SplitResult<AuthorDoc> stratified_split(std::span<const AuthorDoc> docs, double test_fraction,
                                        std::uint64_t seed);

// Concatenation with an id-collision check.
std::vector<Example> merge_predefined_splits(std::span<const Example> train,
                                             std::span<const Example> dev);

}  // namespace figstyle::corpus
