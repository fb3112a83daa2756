#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "segconf/eval.hpp"

namespace segconf {

struct PerImageRecord {
  std::string id;
  double best_threshold = 0.0;
  double best_iou = 0.0;
  double default_iou = 0.0;
};

struct EvalOptions {
  AucPooling pooling = AucPooling::pooled;
  ThresholdGrid grid;
  double default_tau = 0.5;
  std::size_t min_samples = 3;
};

/// Everything `eval` computes for one method over one test set.
struct EvalReport {
  std::string method;
  AucPooling pooling = AucPooling::pooled;
  double auc = 0.0;
  double iou_a = 0.0;
  CalibrationTable calibration;
  std::vector<PerImageRecord> per_image;
  std::vector<GainBin> gains;
  std::vector<RocPoint> roc;
  std::vector<double> grid;
  double default_tau = 0.5;
  std::size_t min_samples = 3;
  std::uint64_t pixel_count = 0;
};

/// Thresholds 0.00, 0.01, ..., 1.00 at which the ROC curve is sampled.
std::vector<double> roc_thresholds();

EvalReport evaluate(std::string method, std::span<const std::string> ids,
                    std::span<const ScoreMap> maps, std::span<const BinaryMask> truths,
                    const EvalOptions& options = {});

nlohmann::json report_to_json(const EvalReport& report);
/// Throws ValidationError on a malformed document.
EvalReport report_from_json(const nlohmann::json& doc);

// CSV tables, header row first, '\n' line endings.
//   calibration.csv: bin,lower,upper,pixel_count,positive_count,fraction
//   per_image.csv:   id,best_threshold,best_iou,default_iou,gain
//   gains.csv:       lower,upper,mean_gain,sample_count
// Undefined fractions are written as empty fields.
std::string calibration_csv(const EvalReport& report);
std::string per_image_csv(const EvalReport& report);
std::string gains_csv(const EvalReport& report);

/// Shortest round-trip decimal representation.
std::string format_number(double value);

}  // namespace segconf
