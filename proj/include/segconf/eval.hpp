#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "segconf/grid.hpp"

namespace segconf {

/// Pixel counts with landslide (1) as the positive class.
struct Confusion {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const noexcept { return tp + fp + tn + fn; }
  Confusion& operator+=(const Confusion& o) noexcept {
    tp += o.tp;
    fp += o.fp;
    tn += o.tn;
    fn += o.fn;
    return *this;
  }
  bool operator==(const Confusion&) const = default;
};

Confusion confusion(const BinaryMask& pred, const BinaryMask& truth);
/// Confusion of the prediction (score >= threshold) against truth.
Confusion confusion_at(const ScoreMap& scores, const BinaryMask& truth, double threshold);
BinaryMask threshold_map(const ScoreMap& scores, double threshold);

struct SegMetrics {
  double iou = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
};

/// 0/0 ratios are reported as 0 (accuracy is never 0/0 for a non-empty image).
SegMetrics seg_metrics(const Confusion& c);
/// tp / (tp + fp + fn), 0 when the union is empty.
double iou(const Confusion& c);

struct CalibrationBin {
  double lower = 0.0;
  double upper = 0.0;
  std::uint64_t pixel_count = 0;
  std::uint64_t positive_count = 0;
  /// Empty when the bin holds no pixels.
  std::optional<double> fraction;
};

inline constexpr std::size_t kCalibrationBins = 10;

struct CalibrationTable {
  std::array<CalibrationBin, kCalibrationBins> bins;

  std::uint64_t total() const noexcept;
};

/// Bin index for a confidence: [0,0.1) -> 0, ..., [0.9,1.0] -> 9.
std::size_t calibration_bin(float confidence);

/// Pools every pixel of every image into ten equal-width confidence bins.
CalibrationTable calibration_table(std::span<const ScoreMap> maps,
                                   std::span<const BinaryMask> truths);

enum class AucPooling { pooled, per_image_mean };

std::string_view to_string(AucPooling pooling);
AucPooling pooling_from_string(std::string_view name);

/// Mann-Whitney AUC with average ranks for ties:
///   (sum of positive ranks - P(P+1)/2) / (P N).
/// Throws ValidationError when the labels hold a single class.
double auc_of(std::span<const float> scores, std::span<const std::uint8_t> labels);

/// `pooled` ranks all pixels of all images together; `per_image_mean`
/// averages the per-image AUCs without weights.
double auc(std::span<const ScoreMap> maps, std::span<const BinaryMask> truths,
           AucPooling pooling = AucPooling::pooled);

struct RocPoint {
  double threshold = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
};

/// Pooled ROC sampled at `thresholds` (prediction = score >= threshold),
/// returned in threshold order.
std::vector<RocPoint> roc_curve(std::span<const ScoreMap> maps, std::span<const BinaryMask> truths,
                                std::span<const double> thresholds);

/// Strictly increasing thresholds in (0,1).
class ThresholdGrid {
public:
  /// {0.1, 0.2, ..., 0.9}
  ThresholdGrid();
  explicit ThresholdGrid(std::vector<double> values);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }

private:
  std::vector<double> values_;
};

struct ImageThresholdRecord {
  std::size_t index = 0;
  double best_threshold = 0.0;
  double best_iou = 0.0;
  double default_iou = 0.0;
};

struct IouAResult {
  double iou_a = 0.0;
  std::vector<ImageThresholdRecord> per_image;
};

/// Image-specific thresholding: per image, the best IoU over the grid (ties
/// go to the smallest threshold), averaged over images. `default_iou` is the
/// IoU at `default_tau`.
IouAResult iou_a(std::span<const ScoreMap> maps, std::span<const BinaryMask> truths,
                 const ThresholdGrid& grid = ThresholdGrid(), double default_tau = 0.5);

struct GainBin {
  double lower = 0.0;
  double upper = 0.0;
  double mean_gain = 0.0;
  std::size_t sample_count = 0;
};

/// Buckets images by default IoU into ten ranges and averages best - default
/// per bucket. Buckets with fewer than `min_samples` images are dropped.
std::vector<GainBin> gain_bins(std::span<const ImageThresholdRecord> records,
                               std::size_t min_samples = 3);

std::vector<GainBin> iou_gain_by_range(std::span<const ScoreMap> maps,
                                       std::span<const BinaryMask> truths,
                                       const ThresholdGrid& grid = ThresholdGrid(),
                                       double default_tau = 0.5, std::size_t min_samples = 3);

}  // namespace segconf
