#include <limits>

#include "doctest.h"
#include "segconf/error.hpp"
#include "segconf/grid.hpp"
#include "segconf/hashing.hpp"

using namespace segconf;

TEST_CASE("grid: image validation") {
  CHECK_THROWS_AS(Image(2, 2, 2, std::vector<float>(8, 0.0f)), ValidationError);
  CHECK_THROWS_AS(Image(2, 2, 1, std::vector<float>(3, 0.0f)), ValidationError);
  CHECK_THROWS_AS(Image(1, 1, 1, {1.5f}), ValidationError);
  CHECK_THROWS_AS(Image(1, 1, 1, {std::numeric_limits<float>::quiet_NaN()}), ValidationError);
  CHECK_NOTHROW(Image(1, 1, 3, {0.0f, 0.5f, 1.0f}));
}

TEST_CASE("grid: score map and mask validation") {
  CHECK_THROWS_AS(ScoreMap(1, 1, {-0.1f}), ValidationError);
  CHECK_THROWS_AS(BinaryMask(1, 1, {2}), ValidationError);
  CHECK(BinaryMask(1, 3, {1, 0, 1}).positive_count() == 2);
}

TEST_CASE("grid: bytes divide by 255") {
  const std::uint8_t bytes[] = {0, 51, 255};
  const auto img = Image::from_bytes(1, 1, 3, bytes);
  CHECK(img.at(0, 0, 1) == 51.0f / 255.0f);
  CHECK(img.at(0, 0, 2) == 1.0f);
}

TEST_CASE("grid: channel split and merge") {
  const Image img(1, 2, 3, {0.1f, 0.2f, 0.3f, 0.4f, 0.5f, 0.6f});
  const auto g = extract_channel(img, 1);
  CHECK(g == ScoreMap(1, 2, {0.2f, 0.5f}));
  const std::vector<ScoreMap> planes{extract_channel(img, 0), g, extract_channel(img, 2)};
  CHECK(merge_channels(planes) == img);
}

TEST_CASE("grid: sample shapes must agree") {
  const Image post(2, 2, 3, std::vector<float>(12, 0.0f));
  const Image small(1, 2, 3, std::vector<float>(6, 0.0f));
  const BinaryMask truth(2, 2, std::vector<std::uint8_t>(4, 0));
  CHECK_NOTHROW(Sample("a", post, post, truth));
  CHECK_THROWS_AS(Sample("a", post, small, truth), ValidationError);
  CHECK_THROWS_AS(Sample("a", small, std::nullopt, truth), ValidationError);
}

TEST_CASE("grid: task names") {
  CHECK(task_from_string("multi") == Task::multi);
  CHECK(to_string(Task::single) == "single");
  CHECK_THROWS_AS(task_from_string("double"), ValidationError);
}

TEST_CASE("hashing: reference values") {
  // splitmix64 from state 0: first output of the reference generator
  CHECK(splitmix64(0) == 0xE220A8397B1DCDAFull);
  CHECK(fnv1a64("") == 0xCBF29CE484222325ull);
  CHECK(fnv1a64("a") == 0xAF63DC4C8601EC8Cull);
  CHECK(unit_double(0) == 0.0);
  CHECK(unit_double(~0ull) < 1.0);
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
