#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "segconf/grid.hpp"
#include "segconf/scorer.hpp"

namespace testing {

/// Fresh directory under the system temp dir, removed on scope exit.
class TempDir {
public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("segconf-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
  std::filesystem::path path_;
};

inline segconf::ScoreMap random_map(std::mt19937_64& rng, std::size_t h, std::size_t w) {
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  std::vector<float> v(h * w);
  for (auto& x : v) x = u(rng);
  return segconf::ScoreMap(h, w, std::move(v));
}

inline segconf::BinaryMask random_mask(std::mt19937_64& rng, std::size_t h, std::size_t w,
                                       double p = 0.5) {
  std::bernoulli_distribution b(p);
  std::vector<std::uint8_t> v(h * w);
  for (auto& x : v) x = b(rng) ? 1 : 0;
  return segconf::BinaryMask(h, w, std::move(v));
}

inline segconf::Image random_image(std::mt19937_64& rng, std::size_t h, std::size_t w,
                                   std::size_t channels = 3) {
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  std::vector<float> v(h * w * channels);
  for (auto& x : v) x = u(rng);
  return segconf::Image(h, w, channels, std::move(v));
}

inline segconf::Sample sample_of(segconf::Image post, std::string id = "x") {
  const auto h = post.height();
  const auto w = post.width();
  return segconf::Sample(std::move(id), std::move(post), std::nullopt,
                         segconf::BinaryMask(h, w, std::vector<std::uint8_t>(h * w, 0)));
}

/// Scorer built from lambdas, for contract tests.
class FnScorer : public segconf::Scorer {
public:
  using Fn = std::function<segconf::ScoreMap(const segconf::Sample&)>;
  using SeededFn = std::function<segconf::ScoreMap(const segconf::Sample&, std::uint64_t)>;

  explicit FnScorer(Fn fn, SeededFn seeded = {}) : fn_(std::move(fn)), seeded_(std::move(seeded)) {}

  segconf::ScorerCapabilities capabilities() const override {
    segconf::ScorerCapabilities caps;
    caps.stochastic = static_cast<bool>(seeded_);
    caps.multi_image = true;
    return caps;
  }
  segconf::ScoreMap score(const segconf::Sample& sample) const override { return fn_(sample); }
  segconf::ScoreMap sample_stochastic(const segconf::Sample& sample,
                                      std::uint64_t seed) const override {
    if (!seeded_) return Scorer::sample_stochastic(sample, seed);
    return seeded_(sample, seed);
  }

private:
  Fn fn_;
  SeededFn seeded_;
};

inline FnScorer constant_scorer(float value) {
  return FnScorer(
      [value](const segconf::Sample& s) {
        return segconf::ScoreMap::filled(s.height(), s.width(), value);
      },
      [value](const segconf::Sample& s, std::uint64_t) {
        return segconf::ScoreMap::filled(s.height(), s.width(), value);
      });
}

}  // namespace testing

#include "segconf/hashing.hpp"
#include "segconf/netpbm.hpp"

namespace testing {

/// SHA-256 over the on-disk encodings of every plane and mask, in sample order.
inline std::string dataset_digest(const std::vector<segconf::Sample>& samples) {
  std::string bytes;
  for (const auto& s : samples) {
    bytes += s.id();
    for (std::size_t c = 0; c < 3; ++c) bytes += segconf::encode_pfm(extract_channel(s.post_image(), c));
    if (s.pre_image()) {
      for (std::size_t c = 0; c < 3; ++c) {
        bytes += segconf::encode_pfm(extract_channel(*s.pre_image(), c));
      }
    }
    bytes += segconf::encode_pgm(s.truth());
  }
  return segconf::sha256_hex(bytes);
}

}  // namespace testing

#include <algorithm>
#include <cstdlib>
#include <sys/wait.h>

namespace testing {

/// Relative path and contents of every regular file, in path order.
inline std::string tree_digest(const std::filesystem::path& root) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files.push_back(std::filesystem::relative(e.path(), root));
  }
  std::sort(files.begin(), files.end());
  std::string bytes;
  for (const auto& f : files) {
    bytes += f.generic_string() + '\0' + segconf::read_file(root / f) + '\0';
  }
  return segconf::sha256_hex(bytes);
}

/// Runs the command line tool, discarding its output; returns the exit code.
inline int run_cli(const std::string& args) {
  const std::string cmd = std::string(SEGCONF_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace testing
