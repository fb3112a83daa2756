#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "segconf/augment.hpp"
#include "segconf/grid.hpp"
#include "segconf/scorer.hpp"

namespace segconf {

enum class Method { pre_threshold, mc_dropout, tta };

/// CLI spelling: "prethresh", "mcdropout", "tta".
std::string_view to_string(Method method);
Method method_from_string(std::string_view name);

/// Per-pixel confidence of the positive class. Values are kept at the
/// double precision of the accumulator; `to_score_map` rounds once to float
/// for storage and evaluation.
class ConfidenceMap {
public:
  ConfidenceMap(Method method, std::size_t height, std::size_t width, std::vector<double> values);

  Method method() const noexcept { return method_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::span<const double> values() const noexcept { return values_; }

  ScoreMap to_score_map() const;

private:
  Method method_;
  std::size_t height_;
  std::size_t width_;
  std::vector<double> values_;
};

/// The raw scorer output, unthresholded.
ConfidenceMap pre_threshold_map(const Scorer& scorer, const Sample& sample);

struct McDropoutOptions {
  std::size_t trials = 286;
  double tau = 0.5;
  /// Trial i uses seed first_seed + i.
  std::uint64_t first_seed = 0;
  std::size_t workers = 1;
};

/// Fraction of stochastic trials in which each pixel scores >= tau.
ConfidenceMap mc_dropout_map(const Scorer& scorer, const Sample& sample,
                             const McDropoutOptions& options = {});

struct TtaOptions {
  std::size_t workers = 1;
};

/// Mean of the pre-threshold scores over the catalog, each realigned by the
/// inverse geometric transform, accumulated in catalog order.
ConfidenceMap tta_map(const Scorer& scorer, const Sample& sample, const Catalog& catalog,
                      const TtaOptions& options = {});

}  // namespace segconf
