#include "figstyle/corpus.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "figstyle/error.hpp"
#include "figstyle/io.hpp"
#include "figstyle/text.hpp"
#include "figstyle/util.hpp"

namespace figstyle::corpus {

using io::Json;

namespace {

constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "metaphor", "simile", "sarcasm", "hyperbole", "idiom", "irony"};

std::string normalized_text(const Json& record, std::string_view key) {
  std::string t = text::normalize(io::require_string(record, key));
  if (t.empty()) throw DataError("field \"" + std::string(key) + "\" is empty");
  return t;
}

}  // namespace

std::string_view name(Feature f) { return kFeatureNames[index(f)]; }

std::optional<Feature> parse_feature(std::string_view s) {
  for (Feature f : kFeatures) {
    if (name(f) == s) return f;
  }
  return std::nullopt;
}

Feature feature_from_name(std::string_view s) {
  if (auto f = parse_feature(s)) return *f;
  throw DataError("unknown feature \"" + std::string(s) + "\"");
}

std::string_view name(Split s) { return s == Split::train ? "train" : "test"; }

Split split_from_name(std::string_view s) {
  if (s == "train") return Split::train;
  if (s == "test") return Split::test;
  throw DataError("unknown split \"" + std::string(s) + "\"");
}

bool LabelAssertions::empty() const {
  if (literal_) return false;
  return std::all_of(state_.begin(), state_.end(),
                     [](Assertion a) { return a == Assertion::unknown; });
}

void LabelAssertions::set(Feature f, Assertion a) {
  Assertion& slot = state_[index(f)];
  if (a == Assertion::unknown || slot == a) return;
  if (slot != Assertion::unknown) {
    throw DataError("conflicting assertions for " + std::string(name(f)));
  }
  if (a == Assertion::positive && literal_) {
    throw DataError("literal example cannot assert " + std::string(name(f)));
  }
  slot = a;
}

void LabelAssertions::set_literal() {
  for (Feature f : kFeatures) {
    if (get(f) == Assertion::positive) {
      throw DataError("literal example cannot assert " + std::string(name(f)));
    }
  }
  literal_ = true;
}

std::vector<std::string> LabelAssertions::label_names() const {
  std::vector<std::string> out;
  for (Feature f : kFeatures) {
    if (get(f) == Assertion::positive) out.emplace_back(name(f));
  }
  for (Feature f : kFeatures) {
    if (get(f) == Assertion::negative) out.push_back("not_" + std::string(name(f)));
  }
  if (literal_) out.emplace_back("literal");
  return out;
}

std::string LabelAssertions::signature() const {
  std::vector<std::string> names = label_names();
  std::sort(names.begin(), names.end());
  std::string sig;
  for (const auto& n : names) {
    if (!sig.empty()) sig += '|';
    sig += n;
  }
  return sig;
}

Example parse_example(const Json& record, std::vector<std::string>& dropped) {
  Example ex;
  ex.id = io::require_string(record, "id");
  if (ex.id.empty()) throw DataError("empty id");
  ex.dataset = io::require_string(record, "dataset");
  ex.split = split_from_name(io::require_string(record, "split"));
  ex.text = normalized_text(record, "text");
  const Json& labels = io::require(record, "labels");
  if (!labels.is_array()) throw DataError("field \"labels\" must be an array");
  for (const Json& l : labels) {
    if (!l.is_string()) throw DataError("labels must be strings");
    const std::string s = l.get<std::string>();
    if (s == "literal") {
      ex.labels.set_literal();
    } else if (auto f = parse_feature(s)) {
      ex.labels.set(*f, Assertion::positive);
    } else if (s.starts_with("not_") && parse_feature(std::string_view(s).substr(4))) {
      ex.labels.set(*parse_feature(std::string_view(s).substr(4)), Assertion::negative);
    } else {
      dropped.push_back(s);
    }
  }
  return ex;
}

Json to_json(const Example& ex) {
  return Json{{"id", ex.id},
              {"dataset", ex.dataset},
              {"split", name(ex.split)},
              {"text", ex.text},
              {"labels", ex.labels.label_names()}};
}

FlLoadResult load_fl_collection(std::span<const std::filesystem::path> paths) {
  FlLoadResult result;
  std::unordered_set<std::string> ids;
  for (const auto& path : paths) {
    io::read_jsonl(path, [&](const Json& record, std::size_t) {
      std::vector<std::string> dropped;
      Example ex = parse_example(record, dropped);
      if (!ids.insert(ex.id).second) throw DataError("duplicate id \"" + ex.id + "\"");
      for (auto& d : dropped) ++result.dropped_by_name[d];
      result.dropped_labels += dropped.size();
      result.examples.push_back(std::move(ex));
    });
  }
  return result;
}

void write_examples(const std::filesystem::path& path, std::span<const Example> examples) {
  io::JsonlWriter w;
  for (const auto& ex : examples) w.add(to_json(ex));
  w.save(path);
}

AuthorDoc parse_doc(const Json& record) {
  AuthorDoc doc;
  doc.doc_id = io::require_string(record, "doc_id");
  if (doc.doc_id.empty()) throw DataError("empty doc_id");
  doc.author = io::require_string(record, "author");
  if (doc.author.empty()) throw DataError("empty author");
  doc.split = split_from_name(io::require_string(record, "split"));
  doc.text = normalized_text(record, "text");
  return doc;
}

Json to_json(const AuthorDoc& doc) {
  return Json{{"doc_id", doc.doc_id},
              {"author", doc.author},
              {"split", name(doc.split)},
              {"text", doc.text}};
}

void check_closed_set(std::span<const AuthorDoc> docs) {
  std::set<std::string> train_authors;
  for (const auto& d : docs) {
    if (d.split == Split::train) train_authors.insert(d.author);
  }
  for (const auto& d : docs) {
    if (d.split == Split::test && !train_authors.contains(d.author)) {
      throw DataError("test author \"" + d.author + "\" (doc " + d.doc_id +
                      ") has no training documents");
    }
  }
}

AaLoadResult load_aa_corpus(const std::filesystem::path& path) {
  AaLoadResult result;
  std::unordered_set<std::string> ids;
  io::read_jsonl(path, [&](const Json& record, std::size_t) {
    AuthorDoc doc = parse_doc(record);
    if (!ids.insert(doc.doc_id).second) throw DataError("duplicate doc_id \"" + doc.doc_id + "\"");
    auto& h = result.histogram[doc.author];
    (doc.split == Split::train ? h.first : h.second) += 1;
    result.docs.push_back(std::move(doc));
  });
  check_closed_set(result.docs);
  return result;
}

void write_docs(const std::filesystem::path& path, std::span<const AuthorDoc> docs) {
  io::JsonlWriter w;
  for (const auto& d : docs) w.add(to_json(d));
  w.save(path);
}

Assignment stratified_assign(std::span<const std::string> strata, double test_fraction,
                             std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test fraction must lie in (0, 1)");
  }
  if (strata.empty()) throw DataError("cannot split an empty collection");
  std::map<std::string, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < strata.size(); ++i) members[strata[i]].push_back(i);

  Assignment out;
  out.is_test.assign(strata.size(), false);
  Rng rng(seed);
  for (auto& [key, idx] : members) {
    const std::size_t s = idx.size();
    if (s == 1) {
      out.warnings.push_back("stratum \"" + key + "\" has a single member; kept in train");
      continue;
    }
    std::size_t k = round_half_up(static_cast<double>(s) * test_fraction);
    k = std::clamp<std::size_t>(k, 1, s - 1);
    rng.partial_shuffle(idx, k);
    for (std::size_t j = 0; j < k; ++j) out.is_test[idx[j]] = true;
  }
  return out;
}

namespace {

template <typename T, typename KeyFn>
SplitResult<T> split_by(std::span<const T> items, double fraction, std::uint64_t seed,
                        KeyFn key) {
  std::vector<std::string> strata;
  strata.reserve(items.size());
  for (const auto& it : items) strata.push_back(key(it));
  Assignment a = stratified_assign(strata, fraction, seed);
  SplitResult<T> out;
  out.warnings = std::move(a.warnings);
  for (std::size_t i = 0; i < items.size(); ++i) {
    T copy = items[i];
    copy.split = a.is_test[i] ? Split::test : Split::train;
    (a.is_test[i] ? out.test : out.train).push_back(std::move(copy));
  }
  return out;
}

}  // namespace

SplitResult<Example> stratified_split(std::span<const Example> examples, double test_fraction,
                                      std::uint64_t seed) {
  return split_by(examples, test_fraction, seed,
                  [](const Example& e) { return e.labels.signature(); });
}

SplitResult<AuthorDoc> stratified_split(std::span<const AuthorDoc> docs, double test_fraction,
                                        std::uint64_t seed) {
  return split_by(docs, test_fraction, seed, [](const AuthorDoc& d) { return d.author; });
}

std::vector<Example> merge_predefined_splits(std::span<const Example> train,
                                             std::span<const Example> dev) {
  std::unordered_set<std::string> ids;
  std::vector<Example> out;
  out.reserve(train.size() + dev.size());
  for (auto part : {train, dev}) {
    for (const auto& ex : part) {
      if (!ids.insert(ex.id).second) throw DataError("id collision \"" + ex.id + "\"");
      Example copy = ex;
      copy.split = Split::train;
      out.push_back(std::move(copy));
    }
  }
  return out;
}

}  // namespace figstyle::corpus
