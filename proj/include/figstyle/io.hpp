#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

#include <json.hpp>

namespace figstyle::io {

using Json = nlohmann::json;

// Invokes fn(record, line_number) for every non-blank line; line numbers start at 1.
// Malformed JSON raises DataError naming the file and line.
void read_jsonl(const std::filesystem::path& path,
                const std::function<void(const Json&, std::size_t)>& fn);

std::string read_file(const std::filesystem::path& path);

// Writes the whole file at once, creating parent directories.
void write_file(const std::filesystem::path& path, std::string_view content);

// One compact JSON object per line.
class JsonlWriter {
 public:
  void add(const Json& record) {
    buffer_ += record.dump();
    buffer_ += '\n';
  }
  const std::string& str() const { return buffer_; }
  void save(const std::filesystem::path& path) const { write_file(path, buffer_); }

 private:
  std::string buffer_;
};

// Typed field access that raises DataError with the field name on mismatch.
const Json& require(const Json& obj, std::string_view key);
std::string require_string(const Json& obj, std::string_view key);

}  // namespace figstyle::io
