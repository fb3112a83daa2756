#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "segconf/grid.hpp"

namespace segconf {

/// The dihedral reflections and quarter turns used for test-time augmentation.
enum class GeometricKind {
  identity,
  horizontal_flip,
  vertical_flip,
  main_diagonal_flip,
  anti_diagonal_flip,
  rotate90,
  rotate270,
};

inline constexpr GeometricKind kAllGeometricKinds[] = {
    GeometricKind::identity,           GeometricKind::horizontal_flip, GeometricKind::vertical_flip,
    GeometricKind::main_diagonal_flip, GeometricKind::anti_diagonal_flip, GeometricKind::rotate90,
    GeometricKind::rotate270,
};

std::string_view to_string(GeometricKind kind);
GeometricKind geometric_from_string(std::string_view name);

/// True for kinds that swap the row and column axes (square input required).
bool changes_shape(GeometricKind kind);

GeometricKind invert_geometric(GeometricKind kind);

// Exact index permutations. Horizontal flip reverses columns, vertical flip
// reverses rows, the main diagonal flip transposes, the anti-diagonal flip
// transposes and reverses both axes, rotate90 turns counter-clockwise.
Image apply_geometric(GeometricKind kind, const Image& image);
ScoreMap apply_geometric(GeometricKind kind, const ScoreMap& map);
BinaryMask apply_geometric(GeometricKind kind, const BinaryMask& mask);

enum class VisualKind { identity, gaussian_blur, linear_contrast, brightness };

std::string_view to_string(VisualKind kind);

/// A photometric transform and its single parameter (sigma, alpha or beta).
class VisualTransform {
public:
  static VisualTransform identity() { return VisualTransform(VisualKind::identity, 0.0); }
  static VisualTransform gaussian_blur(double sigma);
  static VisualTransform linear_contrast(double alpha);
  static VisualTransform brightness(double beta);

  VisualKind kind() const noexcept { return kind_; }
  double parameter() const noexcept { return parameter_; }
  bool is_identity() const noexcept { return kind_ == VisualKind::identity; }

  Image apply(const Image& image) const;

  bool operator==(const VisualTransform&) const = default;

private:
  VisualTransform(VisualKind kind, double parameter) : kind_(kind), parameter_(parameter) {}

  VisualKind kind_;
  double parameter_;
};

/// Separable Gaussian, radius ceil(3 sigma), reflect-101 borders, clamped to [0,1].
Image gaussian_blur(const Image& image, double sigma);
/// clamp(0.5 + alpha (v - 0.5), 0, 1)
Image linear_contrast(const Image& image, double alpha);
/// clamp(v + beta, 0, 1)
Image brightness(const Image& image, double beta);

/// Normalized, truncated 1-D kernel; element j holds the weight at offset j (j >= 0).
std::vector<double> gaussian_half_kernel(double sigma);

/// One catalog entry. The all-identity pair is not a valid entry.
class AugmentationSpec {
public:
  AugmentationSpec(GeometricKind geometric, VisualTransform visual);

  GeometricKind geometric() const noexcept { return geometric_; }
  const VisualTransform& visual() const noexcept { return visual_; }

  bool operator==(const AugmentationSpec&) const = default;

private:
  GeometricKind geometric_;
  VisualTransform visual_;
};

/// Geometric first, then visual, applied to the post-event image and to the
/// pre-event image when present. The truth mask is left as is.
Sample apply_spec(const AugmentationSpec& spec, const Sample& sample);

using Catalog = std::vector<AugmentationSpec>;

// Parameter grids (endpoints inclusive, evenly spaced).
inline constexpr std::size_t kBlurCount = 20;
inline constexpr double kBlurSigmaMin = 0.5;
inline constexpr double kBlurSigmaMax = 3.0;
inline constexpr std::size_t kContrastCount = 10;
inline constexpr double kContrastAlphaMin = 0.7;
inline constexpr double kContrastAlphaMax = 1.3;
inline constexpr std::size_t kBrightnessCount = 10;
inline constexpr double kBrightnessBetaMin = -0.2;
inline constexpr double kBrightnessBetaMax = 0.2;

/// The six non-identity geometric transforms, in catalog order.
std::vector<GeometricKind> geometric_grid();
/// The forty visual transforms: blurs, then contrasts, then brightness shifts.
std::vector<VisualTransform> visual_grid();

/// 286 entries: 6x40 pairs (geometric-major), 6 geometric-only, 40 visual-only.
Catalog build_catalog();

nlohmann::json to_json(const AugmentationSpec& spec);
nlohmann::json catalog_to_json(const Catalog& catalog);
/// Hex SHA-256 of the compact JSON serialization.
std::string catalog_checksum(const Catalog& catalog);

}  // namespace segconf
