#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "segconf/report.hpp"

namespace segconf {

struct PlotPoint {
  double x = 0.0;
  double y = 0.0;
};

/// (bin centre, positive fraction) per calibration bin; empty bins are gaps.
std::vector<std::optional<PlotPoint>> calibration_points(const EvalReport& report);

// Standalone SVG documents, one series per report, with a legend. Output is
// a pure function of the reports.

/// Reliability diagram with the y = x reference line.
std::string calibration_svg(std::span<const EvalReport> reports);
/// Pooled ROC curves with the chance diagonal.
std::string roc_svg(std::span<const EvalReport> reports);
/// Mean IoU gain per default-IoU range, grouped bars.
std::string gains_svg(std::span<const EvalReport> reports);

}  // namespace segconf
