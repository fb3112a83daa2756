#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "segconf/grid.hpp"
#include "segconf/scorer.hpp"

namespace segconf {

/// Parameters of the synthetic landslide-like dataset.
struct SyntheticSpec {
  std::uint64_t seed = 42;
  std::size_t count = 1;
  std::size_t height = 512;
  std::size_t width = 512;
  std::size_t blob_min = 1;
  std::size_t blob_max = 4;
  double noise_level = 0.05;
  Task task = Task::single;

  /// Throws ValidationError on a bad spec.
  void validate() const;
};

/// Samples "s0000", "s0001", ... Each sample draws from its own stream keyed
/// by (seed, index), so sample i does not depend on count.
///
/// Truth: union of blob_min..blob_max axis-aligned ellipses covering 1-15% of
/// the pixels. The base scene is smooth value noise with one or two soil
/// coloured distractor patches. The post-event image shifts the truth region
/// toward brown and adds uniform speckle of amplitude noise_level; the
/// pre-event image (multi task only) is the base scene. All channels are
/// quantized to 8 bits.
std::vector<Sample> generate_synthetic_dataset(const SyntheticSpec& spec);

/// Generates the single sample at `index` of the dataset.
Sample generate_synthetic_sample(const SyntheticSpec& spec, std::size_t index);

// Synthetic scorer constants. Per pixel, in double precision:
//   lum      = (R + G + B) / 3
//   box      = 5x5 box mean of lum, reflect-101 borders; rows summed first
//              (column offsets -2..2 ascending), then the row sums
//              (row offsets -2..2 ascending), divided by 25
//   z        = kRedGreenGain * (R - G) + kContrastGain * |lum - box| + kBias
//   z       += kChangeGain * ((R - G)_post - (R - G)_pre)     multi-image only
//   z       += kNoiseAmplitude * (2u - 1)                     seeded only
//   score    = float(1 / (1 + exp(-z)))
// with u = unit_double(split_seed(split_seed(fnv1a64(id), seed), pixel_index)).
inline constexpr double kRedGreenGain = 12.0;
inline constexpr double kContrastGain = 4.0;
inline constexpr double kBias = -0.25;
inline constexpr double kChangeGain = 6.0;
inline constexpr double kNoiseAmplitude = 1.5;

/// Deterministic when `seed` is empty.
ScoreMap synthetic_score(const Sample& sample, std::optional<std::uint64_t> seed = std::nullopt);

/// In-process scorer with both deterministic and stochastic paths.
class SyntheticScorer final : public Scorer {
public:
  ScorerCapabilities capabilities() const override {
    return {.deterministic = true, .stochastic = true, .multi_image = true, .concurrent = true};
  }
  ScoreMap score(const Sample& sample) const override { return synthetic_score(sample); }
  ScoreMap sample_stochastic(const Sample& sample, std::uint64_t seed) const override {
    return synthetic_score(sample, seed);
  }
};

}  // namespace segconf
