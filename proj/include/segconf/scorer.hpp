#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "segconf/grid.hpp"

namespace segconf {

struct ScorerCapabilities {
  bool deterministic = true;
  bool stochastic = false;
  bool multi_image = false;
  /// False forces callers to serialize invocations.
  bool concurrent = true;
};

/// One scoring call. No seed means the deterministic path.
struct ScoreRequest {
  const Sample* sample = nullptr;
  std::optional<std::uint64_t> seed;
};

/// A segmentation model seen as a black box: sample in, pre-threshold score
/// map out. `sample_stochastic` stands in for inference under a dropout mask,
/// with the seed selecting the mask.
class Scorer {
public:
  virtual ~Scorer() = default;

  virtual ScorerCapabilities capabilities() const = 0;
  virtual ScoreMap score(const Sample& sample) const = 0;
  /// Throws CapabilityError unless overridden.
  virtual ScoreMap sample_stochastic(const Sample& sample, std::uint64_t seed) const;

  /// Results in request order. The default implementation fans out over
  /// `workers` threads when the scorer is concurrent.
  virtual std::vector<ScoreMap> score_batch(std::span<const ScoreRequest> requests,
                                            std::size_t workers) const;
};

}  // namespace segconf
