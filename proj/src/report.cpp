#include "segconf/report.hpp"

#include <charconv>

#include "segconf/error.hpp"

namespace segconf {

using nlohmann::json;

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw Error("format_number: conversion failed");
  return std::string(buf, ptr);
}

std::vector<double> roc_thresholds() {
  std::vector<double> out;
  for (int i = 0; i <= 100; ++i) out.push_back(static_cast<double>(i) / 100.0);
  return out;
}

EvalReport evaluate(std::string method, std::span<const std::string> ids,
                    std::span<const ScoreMap> maps, std::span<const BinaryMask> truths,
                    const EvalOptions& options) {
  if (ids.size() != maps.size()) throw ValidationError("evaluate: ids and maps differ in count");
  if (maps.empty()) throw ValidationError("evaluate: no images to evaluate");

  EvalReport report;
  report.method = std::move(method);
  report.pooling = options.pooling;
  report.auc = auc(maps, truths, options.pooling);
  report.calibration = calibration_table(maps, truths);
  const auto ia = iou_a(maps, truths, options.grid, options.default_tau);
  report.iou_a = ia.iou_a;
  for (const auto& r : ia.per_image) {
    report.per_image.push_back({ids[r.index], r.best_threshold, r.best_iou, r.default_iou});
  }
  report.gains = gain_bins(ia.per_image, options.min_samples);
  const auto thresholds = roc_thresholds();
  report.roc = roc_curve(maps, truths, thresholds);
  report.grid.assign(options.grid.values().begin(), options.grid.values().end());
  report.default_tau = options.default_tau;
  report.min_samples = options.min_samples;
  report.pixel_count = report.calibration.total();
  return report;
}

json report_to_json(const EvalReport& report) {
  json calibration = json::array();
  for (const auto& b : report.calibration.bins) {
    calibration.push_back({{"lower", b.lower},
                           {"upper", b.upper},
                           {"pixel_count", b.pixel_count},
                           {"positive_count", b.positive_count},
                           {"fraction", b.fraction ? json(*b.fraction) : json(nullptr)}});
  }
  json per_image = json::array();
  for (const auto& r : report.per_image) {
    per_image.push_back({{"id", r.id},
                         {"best_threshold", r.best_threshold},
                         {"best_iou", r.best_iou},
                         {"default_iou", r.default_iou}});
  }
  json gains = json::array();
  for (const auto& g : report.gains) {
    gains.push_back({{"lower", g.lower},
                     {"upper", g.upper},
                     {"mean_gain", g.mean_gain},
                     {"sample_count", g.sample_count}});
  }
  json roc = json::array();
  for (const auto& p : report.roc) {
    roc.push_back({{"threshold", p.threshold}, {"fpr", p.fpr}, {"tpr", p.tpr}});
  }
  return {{"method", report.method},
          {"auc_pooling", to_string(report.pooling)},
          {"auc", report.auc},
          {"iou_a", report.iou_a},
          {"image_count", report.per_image.size()},
          {"pixel_count", report.pixel_count},
          {"grid", report.grid},
          {"default_tau", report.default_tau},
          {"min_samples", report.min_samples},
          {"calibration", std::move(calibration)},
          {"per_image", std::move(per_image)},
          {"gain_bins", std::move(gains)},
          {"roc", std::move(roc)}};
}

EvalReport report_from_json(const json& doc) {
  try {
    EvalReport r;
    r.method = doc.at("method").get<std::string>();
    r.pooling = pooling_from_string(doc.at("auc_pooling").get<std::string>());
    r.auc = doc.at("auc").get<double>();
    r.iou_a = doc.at("iou_a").get<double>();
    r.pixel_count = doc.at("pixel_count").get<std::uint64_t>();
    r.grid = doc.at("grid").get<std::vector<double>>();
    r.default_tau = doc.at("default_tau").get<double>();
    r.min_samples = doc.at("min_samples").get<std::size_t>();
    const auto& bins = doc.at("calibration");
    if (!bins.is_array() || bins.size() != kCalibrationBins) {
      throw ValidationError("report: calibration must hold 10 bins");
    }
    for (std::size_t i = 0; i < kCalibrationBins; ++i) {
      auto& b = r.calibration.bins[i];
      b.lower = bins[i].at("lower").get<double>();
      b.upper = bins[i].at("upper").get<double>();
      b.pixel_count = bins[i].at("pixel_count").get<std::uint64_t>();
      b.positive_count = bins[i].at("positive_count").get<std::uint64_t>();
      if (!bins[i].at("fraction").is_null()) b.fraction = bins[i].at("fraction").get<double>();
    }
    for (const auto& p : doc.at("per_image")) {
      r.per_image.push_back({p.at("id").get<std::string>(), p.at("best_threshold").get<double>(),
                             p.at("best_iou").get<double>(), p.at("default_iou").get<double>()});
    }
    for (const auto& g : doc.at("gain_bins")) {
      r.gains.push_back({g.at("lower").get<double>(), g.at("upper").get<double>(),
                         g.at("mean_gain").get<double>(), g.at("sample_count").get<std::size_t>()});
    }
    for (const auto& p : doc.at("roc")) {
      r.roc.push_back(
          {p.at("threshold").get<double>(), p.at("fpr").get<double>(), p.at("tpr").get<double>()});
    }
    return r;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed report: ") + e.what());
  }
}

std::string calibration_csv(const EvalReport& report) {
  std::string out = "bin,lower,upper,pixel_count,positive_count,fraction\n";
  for (std::size_t i = 0; i < kCalibrationBins; ++i) {
    const auto& b = report.calibration.bins[i];
    out += std::to_string(i) + "," + format_number(b.lower) + "," + format_number(b.upper) + "," +
           std::to_string(b.pixel_count) + "," + std::to_string(b.positive_count) + "," +
           (b.fraction ? format_number(*b.fraction) : std::string()) + "\n";
  }
  return out;
}

std::string per_image_csv(const EvalReport& report) {
  std::string out = "id,best_threshold,best_iou,default_iou,gain\n";
  for (const auto& r : report.per_image) {
    out += r.id + "," + format_number(r.best_threshold) + "," + format_number(r.best_iou) + "," +
           format_number(r.default_iou) + "," + format_number(r.best_iou - r.default_iou) + "\n";
  }
  return out;
}

std::string gains_csv(const EvalReport& report) {
  std::string out = "lower,upper,mean_gain,sample_count\n";
  for (const auto& g : report.gains) {
    out += format_number(g.lower) + "," + format_number(g.upper) + "," +
           format_number(g.mean_gain) + "," + std::to_string(g.sample_count) + "\n";
  }
  return out;
}

}  // namespace segconf
