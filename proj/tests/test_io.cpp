#include "doctest.h"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "neuroacc/errors.hpp"
#include "neuroacc/io.hpp"

using namespace neuroacc;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("fnv1a64 reference vectors") {
  CHECK(io::fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(io::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(io::fnv1a64("foobar") == 0x85944171f73967e8ULL);
  CHECK(io::fnv1a64("hello world") == 0x779a65e7023cd2e7ULL);
}

TEST_CASE("hash_hex is 16 lowercase hex digits") {
  CHECK(io::hash_hex(0) == "0000000000000000");
  CHECK(io::hash_hex(0xcbf29ce484222325ULL) == "cbf29ce484222325");
  CHECK(io::hash_hex(0xFFFFFFFFFFFFFFFFULL) == "ffffffffffffffff");
}

TEST_CASE("format_double round-trips exactly") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 200; ++i) {
    double v;
    if (i < 100) {
      // Uniformly random magnitudes across many decades.
      const double mant = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      const int expo = static_cast<int>(rng() % 601) - 300;
      v = (rng() & 1 ? -1.0 : 1.0) * std::ldexp(0.5 + mant, expo);
    } else {
      static const double special[] = {0.0,   1.0,    0.1,  1.0 / 3.0, 1e300,
                                       1e-300, 2.5e-5, 0.45, 0.7,       9.8};
      v = special[static_cast<std::size_t>(i - 100) % 10];
    }
    const double back = std::stod(io::format_double(v));
    CHECK(back == v);
  }
}

TEST_CASE("atomic_write creates the file with exact content") {
  const fs::path dir = fs::temp_directory_path() / "neuroacc_io_test";
  fs::create_directories(dir);
  const fs::path p = dir / "x.txt";
  io::atomic_write(p, "first\n");
  CHECK(slurp(p) == "first\n");
  io::atomic_write(p, "second version, longer\n");
  CHECK(slurp(p) == "second version, longer\n");
  // No temp leftovers.
  std::size_t count = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    (void)e;
    ++count;
  }
  CHECK(count == 1);
  fs::remove_all(dir);
}

TEST_CASE("csv writer shapes and metadata comments") {
  io::CsvWriter w;
  w.comment("tool", "unit-test");
  w.header({"a", "b"});
  w.row({1.5, 2.0});
  w.row_mixed({"x", "y"});
  const std::string s = w.str();
  CHECK(s.find("# tool=unit-test\n") != std::string::npos);
  CHECK(s.find("a,b\n") != std::string::npos);
  CHECK(s.find("1.5,2\n") != std::string::npos);
  CHECK(s.find("x,y\n") != std::string::npos);
  CHECK_THROWS_AS(w.row({1.0, 2.0, 3.0}), DimensionMismatchError);
  CHECK_THROWS_AS(w.row_mixed({"only-one"}), DimensionMismatchError);
}

}  // TEST_SUITE
