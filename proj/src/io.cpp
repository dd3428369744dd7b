#include "neuroacc/io.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "neuroacc/errors.hpp"

namespace neuroacc::io {

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(std::numeric_limits<double>::max_digits10);
  os << v;
  return os.str();
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) {
      throw Error("cannot open " + tmp.string() + " for writing");
    }
    f << content;
    f.flush();
    if (!f) {
      throw Error("short write to " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

void CsvWriter::comment(const std::string& key, const std::string& value) {
  out_ += "# " + key + "=" + value + "\n";
}

void CsvWriter::header(const std::vector<std::string>& columns) {
  n_columns_ = columns.size();
  for (std::size_t i = 0; i < columns.size(); ++i) {
    out_ += columns[i];
    out_ += (i + 1 == columns.size()) ? '\n' : ',';
  }
}

void CsvWriter::row(const std::vector<double>& values) {
  if (n_columns_ != 0 && values.size() != n_columns_) {
    throw DimensionMismatchError("csv row width does not match header");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    out_ += format_double(values[i]);
    out_ += (i + 1 == values.size()) ? '\n' : ',';
  }
}

void CsvWriter::row_mixed(const std::vector<std::string>& values) {
  if (n_columns_ != 0 && values.size() != n_columns_) {
    throw DimensionMismatchError("csv row width does not match header");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    out_ += values[i];
    out_ += (i + 1 == values.size()) ? '\n' : ',';
  }
}

void CsvWriter::write(const std::filesystem::path& path) const {
  atomic_write(path, out_);
}

}  // namespace neuroacc::io
