#include "figstyle/embed.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <unordered_map>

#include "figstyle/error.hpp"
#include "figstyle/io.hpp"

namespace figstyle::embed {

using io::Json;

namespace {

constexpr char kMagic[4] = {'F', 'S', 'V', 'B'};

static_assert(std::endian::native == std::endian::little, "FSVB I/O assumes a little-endian host");

std::vector<double> parse_row(const Json& row, const std::string& id) {
  if (!row.is_array()) throw DataError("vector for \"" + id + "\" is not an array");
  std::vector<double> out;
  out.reserve(row.size());
  for (const Json& v : row) {
    if (!v.is_number()) throw DataError("non-numeric entry in vector for \"" + id + "\"");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw DataError("non-finite entry in vector for \"" + id + "\"");
    out.push_back(x);
  }
  return out;
}

void check_row(const std::vector<double>& row, const std::string& id, std::size_t& dim) {
  if (row.empty()) throw DataError("empty vector for \"" + id + "\"");
  if (dim == 0) dim = row.size();
  if (row.size() != dim) {
    throw DataError("vector for \"" + id + "\" has width " + std::to_string(row.size()) +
                    ", expected " + std::to_string(dim));
  }
}

template <typename T>
T read_pod(std::istream& in, const std::string& what) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw DataError("truncated FSVB file while reading " + what);
  return value;
}

template <typename T>
void write_pod(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

VectorFile load_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  char magic[4];
  in.read(magic, 4);
  const auto dim = read_pod<std::uint32_t>(in, "dim");
  const auto count = read_pod<std::uint64_t>(in, "count");
  if (dim == 0) throw DataError("FSVB file declares zero dimension");
  VectorFile vf;
  vf.dim = dim;
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto len = read_pod<std::uint32_t>(in, "id length");
    std::string id(len, '\0');
    in.read(id.data(), len);
    if (!in) throw DataError("truncated FSVB id block");
    vf.order.push_back(std::move(id));
  }
  std::vector<float> row(dim);
  for (const auto& id : vf.order) {
    in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(dim * sizeof(float)));
    if (!in) throw DataError("truncated FSVB payload");
    VectorRecord rec;
    rec.rows.emplace_back(row.begin(), row.end());
    for (double x : rec.rows.front()) {
      if (!std::isfinite(x)) throw DataError("non-finite entry in vector for \"" + id + "\"");
    }
    if (!vf.records.emplace(id, std::move(rec)).second) throw DataError("duplicate id \"" + id + "\"");
  }
  return vf;
}

}  // namespace

std::vector<double> pool_document(const SentenceVectors& vs) {
  if (vs.rows.empty()) throw DataError("no sentence vectors for \"" + vs.id + "\"");
  const std::size_t dim = vs.rows.front().size();
  std::vector<double> sum(dim, 0.0);
  for (const auto& row : vs.rows) {
    if (row.size() != dim) throw DataError("sentence vectors for \"" + vs.id + "\" differ in width");
    for (std::size_t j = 0; j < dim; ++j) sum[j] += row[j];
  }
  const double n = static_cast<double>(vs.rows.size());
  for (double& x : sum) x /= n;
  return sum;
}

std::string component_spec(std::string_view name, Eigen::Index width) {
  return std::string(name) + "(" + std::to_string(width) + ")";
}

FeatureMatrix make_matrix(std::vector<std::string> doc_ids,
                          const std::vector<std::vector<double>>& rows, std::string feature_spec) {
  if (doc_ids.size() != rows.size()) throw DataError("row count differs from id count");
  FeatureMatrix m;
  m.feature_spec = std::move(feature_spec);
  const Eigen::Index width = rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size());
  m.rows.resize(static_cast<Eigen::Index>(rows.size()), width);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != width) {
      throw DataError("ragged feature rows at \"" + doc_ids[i] + "\"");
    }
    for (Eigen::Index j = 0; j < width; ++j) {
      const double x = rows[i][static_cast<std::size_t>(j)];
      if (!std::isfinite(x)) throw DataError("non-finite feature for \"" + doc_ids[i] + "\"");
      m.rows(static_cast<Eigen::Index>(i), j) = x;
    }
  }
  m.doc_ids = std::move(doc_ids);
  return m;
}

FeatureMatrix concat_features(std::span<const FeatureMatrix> matrices) {
  if (matrices.empty()) throw DataError("nothing to concatenate");
  const FeatureMatrix& first = matrices.front();
  Eigen::Index width = 0;
  for (const auto& m : matrices) {
    if (m.doc_ids != first.doc_ids) {
      throw DataError("document order differs between \"" + first.feature_spec + "\" and \"" +
                      m.feature_spec + "\"");
    }
    width += m.width();
  }
  FeatureMatrix out;
  out.doc_ids = first.doc_ids;
  out.rows.resize(first.rows.rows(), width);
  Eigen::Index col = 0;
  for (const auto& m : matrices) {
    out.rows.middleCols(col, m.width()) = m.rows;
    col += m.width();
    if (!out.feature_spec.empty()) out.feature_spec += '+';
    out.feature_spec += m.feature_spec;
  }
  return out;
}

FeatureMatrix select_rows(const FeatureMatrix& m, std::span<const std::string> ids) {
  std::unordered_map<std::string_view, Eigen::Index> pos;
  for (std::size_t i = 0; i < m.doc_ids.size(); ++i) pos.emplace(m.doc_ids[i], static_cast<Eigen::Index>(i));
  FeatureMatrix out;
  out.feature_spec = m.feature_spec;
  out.rows.resize(static_cast<Eigen::Index>(ids.size()), m.width());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto it = pos.find(ids[i]);
    if (it == pos.end()) throw DataError("no feature row for \"" + ids[i] + "\"");
    out.rows.row(static_cast<Eigen::Index>(i)) = m.rows.row(it->second);
    out.doc_ids.push_back(ids[i]);
  }
  return out;
}

std::vector<double> VectorRecord::document_vector(const std::string& id) const {
  if (!per_sentence) return rows.front();
  return pool_document(SentenceVectors{id, rows});
}

FeatureMatrix VectorFile::assemble(std::span<const std::string> ids,
                                   std::string_view component) const {
  std::vector<std::vector<double>> rows;
  rows.reserve(ids.size());
  for (const auto& id : ids) {
    auto it = records.find(id);
    if (it == records.end()) {
      throw DataError("no " + std::string(component) + " vector for document \"" + id + "\"");
    }
    rows.push_back(it->second.document_vector(id));
  }
  return make_matrix(std::vector<std::string>(ids.begin(), ids.end()), rows,
                     component_spec(component, static_cast<Eigen::Index>(dim)));
}

VectorFile load_vectors(const std::filesystem::path& path, std::optional<std::size_t> expected_dim) {
  VectorFile vf;
  {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw ConfigError("cannot open " + path.string());
    char magic[4] = {};
    probe.read(magic, 4);
    if (probe.gcount() == 4 && std::memcmp(magic, kMagic, 4) == 0) vf = load_binary(path);
  }
  if (vf.dim == 0) {
    io::read_jsonl(path, [&](const Json& record, std::size_t) {
      // stylo.jsonl names its key doc_id; both spellings are accepted.
      const std::string id = record.contains("id") || !record.contains("doc_id")
                                 ? io::require_string(record, "id")
                                 : io::require_string(record, "doc_id");
      VectorRecord rec;
      const bool has_sentences = record.contains("sentences");
      const bool has_vector = record.contains("vector");
      if (has_sentences == has_vector) {
        throw DataError("record \"" + id + "\" needs exactly one of \"sentences\" or \"vector\"");
      }
      if (has_sentences) {
        rec.per_sentence = true;
        const Json& rows = record["sentences"];
        if (!rows.is_array() || rows.empty()) throw DataError("no sentence rows for \"" + id + "\"");
        for (const Json& row : rows) rec.rows.push_back(parse_row(row, id));
      } else {
        rec.rows.push_back(parse_row(record["vector"], id));
      }
      for (const auto& row : rec.rows) check_row(row, id, vf.dim);
      if (!vf.records.emplace(id, std::move(rec)).second) throw DataError("duplicate id \"" + id + "\"");
      vf.order.push_back(id);
    });
  }
  if (expected_dim && vf.dim != 0 && vf.dim != *expected_dim) {
    throw DataError(path.string() + ": vectors have width " + std::to_string(vf.dim) +
                    ", expected " + std::to_string(*expected_dim));
  }
  return vf;
}

std::string vectors_jsonl(const FeatureMatrix& m) {
  io::JsonlWriter w;
  for (Eigen::Index i = 0; i < m.rows.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(m.width()));
    for (Eigen::Index j = 0; j < m.width(); ++j) row[static_cast<std::size_t>(j)] = m.rows(i, j);
    w.add(Json{{"id", m.doc_ids[static_cast<std::size_t>(i)]}, {"vector", row}});
  }
  return w.str();
}

void write_vectors_jsonl(const std::filesystem::path& path, const FeatureMatrix& m) {
  io::write_file(path, vectors_jsonl(m));
}

void write_vectors_binary(const std::filesystem::path& path, const FeatureMatrix& m) {
  std::string out(kMagic, 4);
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(m.width()));
  write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(m.doc_ids.size()));
  for (const auto& id : m.doc_ids) {
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(id.size()));
    out += id;
  }
  for (Eigen::Index i = 0; i < m.rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.width(); ++j) write_pod<float>(out, static_cast<float>(m.rows(i, j)));
  }
  io::write_file(path, out);
}

}  // namespace figstyle::embed
