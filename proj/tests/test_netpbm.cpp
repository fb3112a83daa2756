#include <cstring>
#include <limits>

#include "doctest.h"
#include "segconf/error.hpp"
#include "segconf/netpbm.hpp"
#include "support.hpp"

using namespace segconf;

namespace {

std::string le_bytes(float v) {
  char b[4];
  std::memcpy(b, &v, 4);
  // host is little-endian on every supported target
  return std::string(b, 4);
}

}  // namespace

TEST_CASE("pfm: 1x1 map of 0.5 is header plus 00 00 00 3F") {
  const auto bytes = encode_pfm(ScoreMap(1, 1, {0.5f}));
  CHECK(bytes == std::string("Pf\n1 1\n-1.0\n") + std::string("\x00\x00\x00\x3F", 4));
}

TEST_CASE("pfm: payload rows are stored bottom-up") {
  const ScoreMap map(2, 2, {0.0f, 0.25f, 0.5f, 1.0f});
  // hand-built file: last memory row first
  const std::string expected = "Pf\n2 2\n-1.0\n" + le_bytes(0.5f) + le_bytes(1.0f) +
                               le_bytes(0.0f) + le_bytes(0.25f);
  CHECK(encode_pfm(map) == expected);
  CHECK(decode_pfm(expected) == map);
}

TEST_CASE("pfm: big-endian payloads are accepted") {
  const std::string be = std::string("Pf\n1 1\n1.0\n") + std::string("\x3F\x00\x00\x00", 4);
  CHECK(decode_pfm(be).at(0, 0) == 0.5f);
}

TEST_CASE("pfm: header comments and width/height order") {
  const std::string text = "Pf\n# made by hand\n3 1\n-1\n" + le_bytes(0.1f) + le_bytes(0.2f) +
                           le_bytes(0.3f);
  const auto map = decode_pfm(text);
  CHECK(map.height() == 1);
  CHECK(map.width() == 3);
  CHECK(map.at(0, 2) == 0.3f);
}

TEST_CASE("pfm: write/read round trip is bit exact") {
  testing::TempDir dir;
  std::mt19937_64 rng(7);
  for (int i = 0; i < 5; ++i) {
    const auto map = testing::random_map(rng, 1 + rng() % 40, 1 + rng() % 40);
    write_pfm(map, dir / "m.pfm");
    CHECK(read_pfm(dir / "m.pfm") == map);
  }
}

TEST_CASE("pfm: single-channel images, multi-channel rejected") {
  testing::TempDir dir;
  const Image gray(1, 2, 1, {0.0f, 1.0f});
  write_pfm(gray, dir / "g.pfm");
  CHECK(read_pfm(dir / "g.pfm") == ScoreMap(1, 2, {0.0f, 1.0f}));
  const Image rgb(1, 1, 3, {0.0f, 0.5f, 1.0f});
  CHECK_THROWS_AS(write_pfm(rgb, dir / "c.pfm"), ValidationError);
}

TEST_CASE("pfm: colour header is rejected as unsupported channel count") {
  const std::string text = "PF\n1 1\n-1.0\n" + le_bytes(0.1f) + le_bytes(0.2f) + le_bytes(0.3f);
  try {
    decode_pfm(text);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.kind() == FormatErrorKind::unsupported_channels);
    CHECK(std::string(e.what()).find("unsupported channel count") != std::string::npos);
  }
}

TEST_CASE("pfm: NaN payload names the index") {
  const float nan = std::numeric_limits<float>::quiet_NaN();
  // file order: bottom row (memory index 2,3) first
  const std::string text = "Pf\n2 2\n-1.0\n" + le_bytes(0.1f) + le_bytes(nan) + le_bytes(0.1f) +
                           le_bytes(0.1f);
  try {
    decode_pfm(text);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.kind() == FormatErrorKind::non_finite_value);
    CHECK(std::string(e.what()).find("non-finite value at index 3") != std::string::npos);
  }
}

TEST_CASE("pfm: malformed inputs") {
  auto kind_of = [](const std::string& text) {
    try {
      decode_pfm(text);
    } catch (const FormatError& e) {
      return e.kind();
    }
    FAIL("expected FormatError");
    return FormatErrorKind::malformed_header;
  };
  CHECK(kind_of("P6\n1 1\n255\n\x01") == FormatErrorKind::malformed_header);
  CHECK(kind_of("Pf\n0 1\n-1.0\n") == FormatErrorKind::malformed_header);
  CHECK(kind_of("Pf\n1 1\n0\n" + le_bytes(0.5f)) == FormatErrorKind::malformed_header);
  CHECK(kind_of("Pf\n2 1\n-1.0\n" + le_bytes(0.5f)) == FormatErrorKind::truncated_payload);
  CHECK(kind_of("Pf\n1 1\n-1.0\n" + le_bytes(1.5f)) == FormatErrorKind::out_of_range_value);
  CHECK(kind_of("Pf\n1 1\n-1.0\n" + le_bytes(-std::numeric_limits<float>::infinity())) ==
        FormatErrorKind::non_finite_value);
}

TEST_CASE("pgm: byte threshold at 128") {
  const std::string text = std::string("P5\n4 1\n255\n") + std::string("\xC8\x7F\x80\x00", 4);
  const auto mask = decode_pgm(text);
  CHECK(mask.at(0, 0) == 1);  // 200
  CHECK(mask.at(0, 1) == 0);  // 127
  CHECK(mask.at(0, 2) == 1);  // 128
  CHECK(mask.at(0, 3) == 0);
}

TEST_CASE("pgm: round trip and encoding") {
  testing::TempDir dir;
  std::mt19937_64 rng(11);
  for (int i = 0; i < 5; ++i) {
    const auto mask = testing::random_mask(rng, 1 + rng() % 30, 1 + rng() % 30);
    write_pgm(mask, dir / "m.pgm");
    CHECK(read_pgm(dir / "m.pgm") == mask);
  }
  CHECK(encode_pgm(BinaryMask(1, 2, {1, 0})) == std::string("P5\n2 1\n255\n\xFF\x00", 13));
}

TEST_CASE("pgm: maxval other than 255 is rejected") {
  try {
    decode_pgm(std::string("P5\n1 1\n1\n\x01", 10));
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.kind() == FormatErrorKind::bad_maxval);
  }
}

TEST_CASE("io: missing file is an IoError carrying the path") {
  testing::TempDir dir;
  try {
    read_pfm(dir / "absent.pfm");
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(e.path() == dir / "absent.pfm");
  }
}
