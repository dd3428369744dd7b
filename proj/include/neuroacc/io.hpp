#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace neuroacc::io {

/// FNV-1a 64-bit hash of a byte string. Used to stamp outputs with the
/// identity of the fully-resolved configuration that produced them.
std::uint64_t fnv1a64(const std::string& bytes);

/// Hash rendered as a fixed-width lowercase hex string.
std::string hash_hex(std::uint64_t h);

/// Shortest round-trip decimal rendering of a double (max_digits10).
std::string format_double(double v);

/// Write `content` to `path` atomically: write a sibling temp file, then
/// rename over the destination. Readers never observe a half-written file.
void atomic_write(const std::filesystem::path& path, const std::string& content);

/// Minimal CSV table writer. Comment lines ("# key=value") carry run metadata
/// so every data file is self-identifying.
class CsvWriter {
 public:
  void comment(const std::string& key, const std::string& value);
  void header(const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);
  void row_mixed(const std::vector<std::string>& values);
  const std::string& str() const { return out_; }
  void write(const std::filesystem::path& path) const;

 private:
  std::string out_;
  std::size_t n_columns_ = 0;
};

}  // namespace neuroacc::io
