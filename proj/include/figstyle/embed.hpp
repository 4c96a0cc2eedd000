#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

// Externally produced embedding files, sentence-to-document pooling, and
// feature-matrix assembly.
namespace figstyle::embed {

struct SentenceVectors {
  std::string id;
  std::vector<std::vector<double>> rows;  // one row per sentence
};

// Element-wise mean over sentence rows. Throws DataError on ragged rows.
std::vector<double> pool_document(const SentenceVectors& vs);

struct FeatureMatrix {
  std::vector<std::string> doc_ids;
  Eigen::MatrixXd rows;  // doc_ids.size() x width
  std::string feature_spec;  // e.g. "mflm(768)+char_tfidf(1024)"

  Eigen::Index width() const { return rows.cols(); }
};

// Descriptor for a single component: "<name>(<width>)".
std::string component_spec(std::string_view name, Eigen::Index width);

FeatureMatrix make_matrix(std::vector<std::string> doc_ids,
                          const std::vector<std::vector<double>>& rows, std::string feature_spec);

// Row-wise concatenation; specs joined by '+'. Doc-id order must match exactly.
FeatureMatrix concat_features(std::span<const FeatureMatrix> matrices);

// Rows for ids, in the given order. Throws DataError on a missing id.
FeatureMatrix select_rows(const FeatureMatrix& m, std::span<const std::string> ids);

struct VectorRecord {
  std::vector<std::vector<double>> rows;
  bool per_sentence = false;

  // Document vector: the single row, or the pooled mean for per-sentence records.
  std::vector<double> document_vector(const std::string& id) const;
};

struct VectorFile {
  std::map<std::string, VectorRecord> records;
  std::vector<std::string> order;  // ids in file order
  std::size_t dim = 0;

  // Document vectors for ids (pooled as needed), in the order given.
  FeatureMatrix assemble(std::span<const std::string> ids, std::string_view component) const;
};

// Loads vectors.jsonl (per-sentence or per-document records) or an FSVB binary
// container (detected by its magic bytes). Validates finiteness, constant width,
// unique ids, and expected_dim when provided.
VectorFile load_vectors(const std::filesystem::path& path,
                        std::optional<std::size_t> expected_dim = std::nullopt);

void write_vectors_jsonl(const std::filesystem::path& path, const FeatureMatrix& m);
std::string vectors_jsonl(const FeatureMatrix& m);
// FSVB: "FSVB", u32 dim, u64 count, ids (u32 length + bytes each), float32 row-major.
void write_vectors_binary(const std::filesystem::path& path, const FeatureMatrix& m);

}  // namespace figstyle::embed
