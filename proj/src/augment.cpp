#include "segconf/augment.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "segconf/error.hpp"
#include "segconf/hashing.hpp"

namespace segconf {

namespace {

struct NamedKind {
  GeometricKind kind;
  std::string_view name;
};

constexpr NamedKind kGeometricNames[] = {
    {GeometricKind::identity, "Identity"},
    {GeometricKind::horizontal_flip, "HorizontalFlip"},
    {GeometricKind::vertical_flip, "VerticalFlip"},
    {GeometricKind::main_diagonal_flip, "MainDiagonalFlip"},
    {GeometricKind::anti_diagonal_flip, "AntiDiagonalFlip"},
    {GeometricKind::rotate90, "Rotate90"},
    {GeometricKind::rotate270, "Rotate270"},
};

/// Output row r reads source pixels base + c * step, c = 0..w-1.
struct RowWalk {
  std::ptrdiff_t base;
  std::ptrdiff_t step;
};

RowWalk row_walk(GeometricKind kind, std::size_t r, std::size_t h, std::size_t w) {
  const auto H = static_cast<std::ptrdiff_t>(h);
  const auto W = static_cast<std::ptrdiff_t>(w);
  const auto R = static_cast<std::ptrdiff_t>(r);
  switch (kind) {
    case GeometricKind::identity: return {R * W, 1};
    case GeometricKind::horizontal_flip: return {R * W + W - 1, -1};
    case GeometricKind::vertical_flip: return {(H - 1 - R) * W, 1};
    case GeometricKind::main_diagonal_flip: return {R, W};
    case GeometricKind::anti_diagonal_flip: return {(W - 1) * W + (H - 1 - R), -W};
    case GeometricKind::rotate90: return {W - 1 - R, W};
    case GeometricKind::rotate270: return {(H - 1) * W + R, -W};
  }
  throw ValidationError("unknown geometric transform");
}

template <typename T>
std::vector<T> permute(GeometricKind kind, std::size_t h, std::size_t w, std::size_t channels,
                       std::span<const T> in) {
  if (changes_shape(kind) && h != w) {
    throw ValidationError(std::string(to_string(kind)) + " requires a square grid, got " +
                          std::to_string(h) + "x" + std::to_string(w));
  }
  if (kind == GeometricKind::identity) return std::vector<T>(in.begin(), in.end());
  std::vector<T> out(in.size());
  for (std::size_t r = 0; r < h; ++r) {
    const auto [base, step] = row_walk(kind, r, h, w);
    T* dst = out.data() + r * w * channels;
    for (std::size_t c = 0; c < w; ++c) {
      const auto src = static_cast<std::size_t>(base + static_cast<std::ptrdiff_t>(c) * step);
      for (std::size_t q = 0; q < channels; ++q) dst[c * channels + q] = in[src * channels + q];
    }
  }
  return out;
}

/// Reflect-101 ("mirror without repeating the edge pixel").
std::size_t reflect(std::ptrdiff_t i, std::size_t n) {
  if (n == 1) return 0;
  const auto period = static_cast<std::ptrdiff_t>(2 * (n - 1));
  i %= period;
  if (i < 0) i += period;
  if (i >= static_cast<std::ptrdiff_t>(n)) i = period - i;
  return static_cast<std::size_t>(i);
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return out;
}

template <typename F>
Image map_values(const Image& image, F&& f) {
  const auto in = image.data();
  std::vector<float> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    out[i] = static_cast<float>(std::clamp(f(static_cast<double>(in[i])), 0.0, 1.0));
  }
  return Image(image.height(), image.width(), image.channels(), std::move(out));
}

}  // namespace

std::string_view to_string(GeometricKind kind) {
  for (const auto& [k, name] : kGeometricNames) {
    if (k == kind) return name;
  }
  return "Unknown";
}

GeometricKind geometric_from_string(std::string_view name) {
  for (const auto& [k, n] : kGeometricNames) {
    if (n == name) return k;
  }
  throw ValidationError("unknown geometric transform '" + std::string(name) + "'");
}

bool changes_shape(GeometricKind kind) {
  return kind == GeometricKind::main_diagonal_flip || kind == GeometricKind::anti_diagonal_flip ||
         kind == GeometricKind::rotate90 || kind == GeometricKind::rotate270;
}

GeometricKind invert_geometric(GeometricKind kind) {
  switch (kind) {
    case GeometricKind::rotate90: return GeometricKind::rotate270;
    case GeometricKind::rotate270: return GeometricKind::rotate90;
    default: return kind;
  }
}

Image apply_geometric(GeometricKind kind, const Image& image) {
  return Image(image.height(), image.width(), image.channels(),
               permute(kind, image.height(), image.width(), image.channels(), image.data()));
}

ScoreMap apply_geometric(GeometricKind kind, const ScoreMap& map) {
  return ScoreMap(map.height(), map.width(), permute(kind, map.height(), map.width(), 1, map.data()));
}

BinaryMask apply_geometric(GeometricKind kind, const BinaryMask& mask) {
  return BinaryMask(mask.height(), mask.width(),
                    permute(kind, mask.height(), mask.width(), 1, mask.data()));
}

std::string_view to_string(VisualKind kind) {
  switch (kind) {
    case VisualKind::identity: return "Identity";
    case VisualKind::gaussian_blur: return "GaussianBlur";
    case VisualKind::linear_contrast: return "LinearContrast";
    case VisualKind::brightness: return "Brightness";
  }
  return "Unknown";
}

VisualTransform VisualTransform::gaussian_blur(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ValidationError("gaussian blur sigma must be > 0, got " + std::to_string(sigma));
  }
  return VisualTransform(VisualKind::gaussian_blur, sigma);
}

VisualTransform VisualTransform::linear_contrast(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ValidationError("linear contrast alpha must be > 0, got " + std::to_string(alpha));
  }
  return VisualTransform(VisualKind::linear_contrast, alpha);
}

VisualTransform VisualTransform::brightness(double beta) {
  if (!(beta >= -1.0 && beta <= 1.0)) {
    throw ValidationError("brightness beta must be in [-1,1], got " + std::to_string(beta));
  }
  return VisualTransform(VisualKind::brightness, beta);
}

Image VisualTransform::apply(const Image& image) const {
  switch (kind_) {
    case VisualKind::identity: return image;
    case VisualKind::gaussian_blur: return segconf::gaussian_blur(image, parameter_);
    case VisualKind::linear_contrast: return segconf::linear_contrast(image, parameter_);
    case VisualKind::brightness: return segconf::brightness(image, parameter_);
  }
  throw ValidationError("unknown visual transform");
}

std::vector<double> gaussian_half_kernel(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ValidationError("gaussian blur sigma must be > 0, got " + std::to_string(sigma));
  }
  const auto radius = static_cast<std::size_t>(std::ceil(3.0 * sigma));
  std::vector<double> k(radius + 1);
  double total = 0.0;
  for (std::size_t j = 0; j <= radius; ++j) {
    const double x = static_cast<double>(j);
    k[j] = std::exp(-(x * x) / (2.0 * sigma * sigma));
    total += j == 0 ? k[j] : 2.0 * k[j];
  }
  for (auto& v : k) v /= total;
  return k;
}

Image gaussian_blur(const Image& image, double sigma) {
  const auto k = gaussian_half_kernel(sigma);
  const std::size_t radius = k.size() - 1;
  const std::size_t h = image.height();
  const std::size_t w = image.width();
  const std::size_t ch = image.channels();
  const auto in = image.data();

  // Mirrored taps are summed pairwise, so the result is exactly symmetric
  // under flips along either axis.
  const auto taps = [radius](std::size_t n) {
    std::vector<std::size_t> idx(n * (2 * radius + 1));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t t = 0; t <= 2 * radius; ++t) {
        const auto offset = static_cast<std::ptrdiff_t>(t) - static_cast<std::ptrdiff_t>(radius);
        idx[i * (2 * radius + 1) + t] = reflect(static_cast<std::ptrdiff_t>(i) + offset, n);
      }
    }
    return idx;
  };
  const std::size_t span_len = 2 * radius + 1;

  // Horizontal pass over a reflect-padded copy of each channel row.
  std::vector<double> tmp(in.size());
  std::vector<double> padded(w + 2 * radius);
  std::vector<double> acc_row(w);
  for (std::size_t r = 0; r < h; ++r) {
    const float* row = in.data() + r * w * ch;
    double* dst = tmp.data() + r * w * ch;
    for (std::size_t q = 0; q < ch; ++q) {
      for (std::size_t i = 0; i < padded.size(); ++i) {
        const auto src = static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(radius);
        padded[i] = row[reflect(src, w) * ch + q];
      }
      const double* centre = padded.data() + radius;
      for (std::size_t c = 0; c < w; ++c) acc_row[c] = k[0] * centre[c];
      for (std::size_t j = 1; j <= radius; ++j) {
        const double* left = centre - j;
        const double* right = centre + j;
        for (std::size_t c = 0; c < w; ++c) acc_row[c] += k[j] * (left[c] + right[c]);
      }
      for (std::size_t c = 0; c < w; ++c) dst[c * ch + q] = acc_row[c];
    }
  }

  const auto row_taps = taps(h);
  const std::size_t stride = w * ch;
  std::vector<double> acc(stride);
  std::vector<float> out(in.size());
  for (std::size_t r = 0; r < h; ++r) {
    const std::size_t* t = row_taps.data() + r * span_len;
    const double* centre = tmp.data() + t[radius] * stride;
    for (std::size_t i = 0; i < stride; ++i) acc[i] = k[0] * centre[i];
    for (std::size_t j = 1; j <= radius; ++j) {
      const double* above = tmp.data() + t[radius - j] * stride;
      const double* below = tmp.data() + t[radius + j] * stride;
      for (std::size_t i = 0; i < stride; ++i) acc[i] += k[j] * (above[i] + below[i]);
    }
    float* dst = out.data() + r * stride;
    for (std::size_t i = 0; i < stride; ++i) dst[i] = static_cast<float>(std::clamp(acc[i], 0.0, 1.0));
  }
  return Image(h, w, ch, std::move(out));
}

Image linear_contrast(const Image& image, double alpha) {
  if (!(alpha > 0.0)) {
    throw ValidationError("linear contrast alpha must be > 0, got " + std::to_string(alpha));
  }
  return map_values(image, [alpha](double v) { return 0.5 + alpha * (v - 0.5); });
}

Image brightness(const Image& image, double beta) {
  if (!(beta >= -1.0 && beta <= 1.0)) {
    throw ValidationError("brightness beta must be in [-1,1], got " + std::to_string(beta));
  }
  // Float addition, so that v - v lands on exactly 0.
  const auto b = static_cast<float>(beta);
  return map_values(image, [b](double v) { return static_cast<double>(static_cast<float>(v) + b); });
}

AugmentationSpec::AugmentationSpec(GeometricKind geometric, VisualTransform visual)
    : geometric_(geometric), visual_(visual) {
  if (geometric == GeometricKind::identity && visual.is_identity()) {
    throw ValidationError("augmentation spec must change something: both parts are identity");
  }
}

Sample apply_spec(const AugmentationSpec& spec, const Sample& sample) {
  const auto transform = [&](const Image& img) {
    return spec.visual().apply(apply_geometric(spec.geometric(), img));
  };
  std::optional<Image> pre;
  if (sample.pre_image()) pre = transform(*sample.pre_image());
  return sample.with_images(transform(sample.post_image()), std::move(pre));
}

std::vector<GeometricKind> geometric_grid() {
  return {GeometricKind::horizontal_flip, GeometricKind::vertical_flip,
          GeometricKind::main_diagonal_flip, GeometricKind::anti_diagonal_flip,
          GeometricKind::rotate90, GeometricKind::rotate270};
}

std::vector<VisualTransform> visual_grid() {
  std::vector<VisualTransform> out;
  out.reserve(kBlurCount + kContrastCount + kBrightnessCount);
  for (const double s : linspace(kBlurSigmaMin, kBlurSigmaMax, kBlurCount)) {
    out.push_back(VisualTransform::gaussian_blur(s));
  }
  for (const double a : linspace(kContrastAlphaMin, kContrastAlphaMax, kContrastCount)) {
    out.push_back(VisualTransform::linear_contrast(a));
  }
  for (const double b : linspace(kBrightnessBetaMin, kBrightnessBetaMax, kBrightnessCount)) {
    out.push_back(VisualTransform::brightness(b));
  }
  return out;
}

Catalog build_catalog() {
  const auto geometric = geometric_grid();
  const auto visual = visual_grid();
  Catalog catalog;
  catalog.reserve(geometric.size() * visual.size() + geometric.size() + visual.size());
  for (const auto g : geometric) {
    for (const auto& v : visual) catalog.emplace_back(g, v);
  }
  for (const auto g : geometric) catalog.emplace_back(g, VisualTransform::identity());
  for (const auto& v : visual) catalog.emplace_back(GeometricKind::identity, v);
  return catalog;
}

nlohmann::json to_json(const AugmentationSpec& spec) {
  nlohmann::json visual = {{"kind", to_string(spec.visual().kind())}};
  switch (spec.visual().kind()) {
    case VisualKind::identity: break;
    case VisualKind::gaussian_blur: visual["sigma"] = spec.visual().parameter(); break;
    case VisualKind::linear_contrast: visual["alpha"] = spec.visual().parameter(); break;
    case VisualKind::brightness: visual["beta"] = spec.visual().parameter(); break;
  }
  return {{"geometric", to_string(spec.geometric())}, {"visual", std::move(visual)}};
}

nlohmann::json catalog_to_json(const Catalog& catalog) {
  nlohmann::json entries = nlohmann::json::array();
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    auto e = to_json(catalog[i]);
    e["index"] = i;
    entries.push_back(std::move(e));
  }
  return {{"size", catalog.size()}, {"entries", std::move(entries)}};
}

std::string catalog_checksum(const Catalog& catalog) {
  return sha256_hex(catalog_to_json(catalog).dump());
}

}  // namespace segconf
