#include "segconf/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "segconf/error.hpp"
#include "segconf/hashing.hpp"

namespace segconf {

namespace {

using Rgb = std::array<double, 3>;

constexpr Rgb kTerrain = {0.30, 0.42, 0.25};
constexpr Rgb kSoil = {0.50, 0.43, 0.31};
constexpr Rgb kLandslide = {0.58, 0.40, 0.26};
constexpr double kLandslideMix = 0.6;
constexpr double kSoilMix = 0.5;
constexpr double kMinForeground = 0.01;
constexpr double kMaxForeground = 0.15;
constexpr int kMaxTruthAttempts = 200;

class Stream {
public:
  explicit Stream(std::uint64_t key) : engine_(key) {}

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit_double(engine_()); }
  std::size_t integer(std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(engine_() % (hi - lo + 1));
  }

private:
  std::mt19937_64 engine_;
};

struct Ellipse {
  double cx, cy, rx, ry;

  bool contains(std::size_t r, std::size_t c) const {
    const double dx = (static_cast<double>(c) + 0.5 - cx) / rx;
    const double dy = (static_cast<double>(r) + 0.5 - cy) / ry;
    return dx * dx + dy * dy <= 1.0;
  }
};

/// Smooth value noise in [0,1].
std::vector<double> value_noise(Stream& rng, std::size_t h, std::size_t w) {
  const std::size_t cell = std::max<std::size_t>(4, h / 8);
  const std::size_t gh = h / cell + 2;
  const std::size_t gw = w / cell + 2;
  std::vector<double> lattice(gh * gw);
  for (auto& v : lattice) v = rng.uniform(0.0, 1.0);

  const auto smooth = [](double t) { return t * t * (3.0 - 2.0 * t); };
  std::vector<double> out(h * w);
  for (std::size_t r = 0; r < h; ++r) {
    const double fy = static_cast<double>(r) / static_cast<double>(cell);
    const auto iy = static_cast<std::size_t>(fy);
    const double ty = smooth(fy - static_cast<double>(iy));
    for (std::size_t c = 0; c < w; ++c) {
      const double fx = static_cast<double>(c) / static_cast<double>(cell);
      const auto ix = static_cast<std::size_t>(fx);
      const double tx = smooth(fx - static_cast<double>(ix));
      const double a = lattice[iy * gw + ix];
      const double b = lattice[iy * gw + ix + 1];
      const double cc = lattice[(iy + 1) * gw + ix];
      const double d = lattice[(iy + 1) * gw + ix + 1];
      const double top = a + (b - a) * tx;
      const double bottom = cc + (d - cc) * tx;
      out[r * w + c] = top + (bottom - top) * ty;
    }
  }
  return out;
}

Ellipse random_ellipse(Stream& rng, std::size_t h, std::size_t w, double area) {
  const double aspect = rng.uniform(0.5, 2.0);
  const double max_rx = std::max(1.0, static_cast<double>(w) / 2.0 - 1.0);
  const double max_ry = std::max(1.0, static_cast<double>(h) / 2.0 - 1.0);
  const double rx = std::clamp(std::sqrt(area * aspect / std::numbers::pi), 1.0, max_rx);
  const double ry = std::clamp(std::sqrt(area / (aspect * std::numbers::pi)), 1.0, max_ry);
  const double cx = rng.uniform(rx, static_cast<double>(w) - rx);
  const double cy = rng.uniform(ry, static_cast<double>(h) - ry);
  return {cx, cy, rx, ry};
}

float quantize(double v) {
  const double level = std::round(std::clamp(v, 0.0, 1.0) * 255.0);
  return static_cast<float>(level) / 255.0f;
}

std::string sample_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "s%04zu", index);
  return buf;
}

/// Reflect-101 index for the 5x5 box.
std::size_t mirror(std::ptrdiff_t i, std::size_t n) {
  if (n == 1) return 0;
  const auto period = static_cast<std::ptrdiff_t>(2 * (n - 1));
  i %= period;
  if (i < 0) i += period;
  if (i >= static_cast<std::ptrdiff_t>(n)) i = period - i;
  return static_cast<std::size_t>(i);
}

}  // namespace

void SyntheticSpec::validate() const {
  if (count < 1) throw ValidationError("synthetic spec: count must be >= 1");
  if (height != width) {
    throw ValidationError("synthetic spec: height and width must match, got " +
                          std::to_string(height) + "x" + std::to_string(width));
  }
  if (height < 16) throw ValidationError("synthetic spec: size must be at least 16");
  if (blob_min < 1 || blob_min > blob_max) {
    throw ValidationError("synthetic spec: need 1 <= blob_min <= blob_max");
  }
  if (!(noise_level >= 0.0 && noise_level <= 0.5)) {
    throw ValidationError("synthetic spec: noise_level must be in [0, 0.5]");
  }
}

Sample generate_synthetic_sample(const SyntheticSpec& spec, std::size_t index) {
  spec.validate();
  const std::size_t h = spec.height;
  const std::size_t w = spec.width;
  const std::size_t n = h * w;
  Stream rng(split_seed(spec.seed, index));

  const auto brightness = value_noise(rng, h, w);
  const auto hue = value_noise(rng, h, w);
  std::vector<double> base(n * 3);
  for (std::size_t i = 0; i < n; ++i) {
    const double lift = 0.20 * (brightness[i] - 0.5);
    const double tint = 0.04 * (hue[i] - 0.5);
    base[i * 3 + 0] = kTerrain[0] + lift + tint;
    base[i * 3 + 1] = kTerrain[1] + lift - tint;
    base[i * 3 + 2] = kTerrain[2] + lift;
  }

  // Bare soil present before and after the event.
  const std::size_t distractors = rng.integer(1, 2);
  for (std::size_t d = 0; d < distractors; ++d) {
    const auto e = random_ellipse(rng, h, w, rng.uniform(0.005, 0.03) * static_cast<double>(n));
    for (std::size_t r = 0; r < h; ++r) {
      for (std::size_t c = 0; c < w; ++c) {
        if (!e.contains(r, c)) continue;
        for (std::size_t q = 0; q < 3; ++q) {
          double& v = base[(r * w + c) * 3 + q];
          v = (1.0 - kSoilMix) * v + kSoilMix * kSoil[q];
        }
      }
    }
  }

  std::vector<std::uint8_t> truth(n, 0);
  bool accepted = false;
  for (int attempt = 0; attempt < kMaxTruthAttempts && !accepted; ++attempt) {
    std::fill(truth.begin(), truth.end(), std::uint8_t{0});
    const std::size_t blobs = rng.integer(spec.blob_min, spec.blob_max);
    const double target = rng.uniform(0.02, 0.12) * static_cast<double>(n);
    for (std::size_t b = 0; b < blobs; ++b) {
      const auto e = random_ellipse(rng, h, w, target / static_cast<double>(blobs));
      for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t c = 0; c < w; ++c) {
          if (e.contains(r, c)) truth[r * w + c] = 1;
        }
      }
    }
    const double fraction =
        static_cast<double>(std::count(truth.begin(), truth.end(), std::uint8_t{1})) /
        static_cast<double>(n);
    accepted = fraction >= kMinForeground && fraction <= kMaxForeground;
  }
  if (!accepted) {
    throw ValidationError("synthetic generator could not place foreground within bounds");
  }

  std::vector<float> post(n * 3);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t q = 0; q < 3; ++q) {
      double v = base[i * 3 + q];
      if (truth[i]) v = (1.0 - kLandslideMix) * v + kLandslideMix * kLandslide[q];
      v += spec.noise_level * rng.uniform(-1.0, 1.0);
      post[i * 3 + q] = quantize(v);
    }
  }

  std::optional<Image> pre;
  if (spec.task == Task::multi) {
    std::vector<float> pre_data(n * 3);
    for (std::size_t i = 0; i < n * 3; ++i) pre_data[i] = quantize(base[i]);
    pre = Image(h, w, 3, std::move(pre_data));
  }

  return Sample(sample_id(index), Image(h, w, 3, std::move(post)), std::move(pre),
                BinaryMask(h, w, std::move(truth)));
}

std::vector<Sample> generate_synthetic_dataset(const SyntheticSpec& spec) {
  spec.validate();
  std::vector<Sample> out;
  out.reserve(spec.count);
  for (std::size_t i = 0; i < spec.count; ++i) out.push_back(generate_synthetic_sample(spec, i));
  return out;
}

ScoreMap synthetic_score(const Sample& sample, std::optional<std::uint64_t> seed) {
  const auto& img = sample.post_image();
  if (img.channels() != 3) throw ValidationError("synthetic scorer needs RGB input");
  const std::size_t h = img.height();
  const std::size_t w = img.width();
  const std::size_t n = h * w;
  const auto px = img.data();

  std::vector<double> lum(n);
  for (std::size_t i = 0; i < n; ++i) {
    lum[i] = (static_cast<double>(px[i * 3]) + static_cast<double>(px[i * 3 + 1]) +
              static_cast<double>(px[i * 3 + 2])) / 3.0;
  }
  // Mirrored neighbour indices for offsets -2..2.
  const auto neighbours = [](std::size_t len) {
    std::vector<std::size_t> idx(len * 5);
    for (std::size_t i = 0; i < len; ++i) {
      for (std::ptrdiff_t d = -2; d <= 2; ++d) {
        idx[i * 5 + static_cast<std::size_t>(d + 2)] = mirror(static_cast<std::ptrdiff_t>(i) + d, len);
      }
    }
    return idx;
  };
  const auto cols = neighbours(w);
  const auto rows = neighbours(h);

  std::vector<double> row_sum(n);
  for (std::size_t r = 0; r < h; ++r) {
    const double* src = lum.data() + r * w;
    for (std::size_t c = 0; c < w; ++c) {
      const std::size_t* t = cols.data() + c * 5;
      double s = 0.0;
      for (std::size_t d = 0; d < 5; ++d) s += src[t[d]];
      row_sum[r * w + c] = s;
    }
  }

  const float* pre = sample.pre_image() ? sample.pre_image()->data().data() : nullptr;
  const std::uint64_t id_key = fnv1a64(sample.id());
  const std::uint64_t noise_key = seed ? split_seed(id_key, *seed) : 0;

  std::vector<double> box_sum(w);
  std::vector<float> out(n);
  for (std::size_t r = 0; r < h; ++r) {
    const std::size_t* t = rows.data() + r * 5;
    std::fill(box_sum.begin(), box_sum.end(), 0.0);
    for (std::size_t d = 0; d < 5; ++d) {
      const double* src = row_sum.data() + t[d] * w;
      for (std::size_t c = 0; c < w; ++c) box_sum[c] += src[c];
    }
    for (std::size_t c = 0; c < w; ++c) {
      const std::size_t i = r * w + c;
      const double box = box_sum[c] / 25.0;
      const double red_green = static_cast<double>(px[i * 3]) - static_cast<double>(px[i * 3 + 1]);
      double z = kRedGreenGain * red_green + kContrastGain * std::abs(lum[i] - box) + kBias;
      if (pre) {
        const double pre_rg = static_cast<double>(pre[i * 3]) - static_cast<double>(pre[i * 3 + 1]);
        z += kChangeGain * (red_green - pre_rg);
      }
      if (seed) z += kNoiseAmplitude * (2.0 * unit_double(split_seed(noise_key, i)) - 1.0);
      out[i] = static_cast<float>(1.0 / (1.0 + std::exp(-z)));
    }
  }
  return ScoreMap(h, w, std::move(out));
}

}  // namespace segconf
