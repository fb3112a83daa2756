#include "segconf/eval.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "segconf/error.hpp"

namespace segconf {

namespace {

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

void check_aligned(std::span<const ScoreMap> maps, std::span<const BinaryMask> truths) {
  if (maps.size() != truths.size()) {
    throw ValidationError("evaluation: " + std::to_string(maps.size()) + " maps but " +
                          std::to_string(truths.size()) + " truth masks");
  }
  for (std::size_t i = 0; i < maps.size(); ++i) {
    if (maps[i].height() != truths[i].height() || maps[i].width() != truths[i].width()) {
      throw ValidationError("evaluation: image " + std::to_string(i) +
                            " map and truth shapes differ");
    }
  }
}

/// Sort key: scores in [0,1] order like their bit patterns (with -0 folded
/// onto +0); the label rides in the low bit.
std::uint64_t rank_key(float score, std::uint8_t label) {
  const std::uint32_t bits = score == 0.0f ? 0u : std::bit_cast<std::uint32_t>(score);
  return (static_cast<std::uint64_t>(bits) << 1) | label;
}

double auc_of_keys(std::vector<std::uint64_t>& keys, const std::string& scope) {
  std::uint64_t positives = 0;
  for (const auto k : keys) positives += k & 1u;
  const std::uint64_t negatives = keys.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw ValidationError("auc: " + scope + " has only " +
                          (positives == 0 ? std::string("negative") : std::string("positive")) +
                          " pixels");
  }
  std::sort(keys.begin(), keys.end());

  // Twice the average rank of a tie group occupying 0-based [s, s+g) is 2s+g+1.
  std::uint64_t twice_rank_sum = 0;
  std::size_t s = 0;
  while (s < keys.size()) {
    std::size_t e = s + 1;
    while (e < keys.size() && (keys[e] >> 1) == (keys[s] >> 1)) ++e;
    std::uint64_t group_pos = 0;
    for (std::size_t i = s; i < e; ++i) group_pos += keys[i] & 1u;
    twice_rank_sum += group_pos * (2 * s + (e - s) + 1);
    s = e;
  }
  const std::uint64_t twice_u = twice_rank_sum - positives * (positives + 1);
  return static_cast<double>(twice_u) /
         (2.0 * static_cast<double>(positives) * static_cast<double>(negatives));
}

/// Count of grid thresholds t with score >= t.
std::size_t level_of(float score, std::span<const double> grid) {
  const auto v = static_cast<double>(score);
  return static_cast<std::size_t>(std::upper_bound(grid.begin(), grid.end(), v) - grid.begin());
}

}  // namespace

Confusion confusion(const BinaryMask& pred, const BinaryMask& truth) {
  if (pred.height() != truth.height() || pred.width() != truth.width()) {
    throw ValidationError("confusion: prediction and truth shapes differ");
  }
  Confusion c;
  const auto p = pred.data();
  const auto t = truth.data();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i]) {
      t[i] ? ++c.tp : ++c.fp;
    } else {
      t[i] ? ++c.fn : ++c.tn;
    }
  }
  return c;
}

Confusion confusion_at(const ScoreMap& scores, const BinaryMask& truth, double threshold) {
  if (scores.height() != truth.height() || scores.width() != truth.width()) {
    throw ValidationError("confusion: score map and truth shapes differ");
  }
  Confusion c;
  const auto s = scores.data();
  const auto t = truth.data();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (static_cast<double>(s[i]) >= threshold) {
      t[i] ? ++c.tp : ++c.fp;
    } else {
      t[i] ? ++c.fn : ++c.tn;
    }
  }
  return c;
}

BinaryMask threshold_map(const ScoreMap& scores, double threshold) {
  std::vector<std::uint8_t> out(scores.pixel_count());
  const auto s = scores.data();
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = static_cast<double>(s[i]) >= threshold;
  return BinaryMask(scores.height(), scores.width(), std::move(out));
}

double iou(const Confusion& c) { return ratio(c.tp, c.tp + c.fp + c.fn); }

SegMetrics seg_metrics(const Confusion& c) {
  SegMetrics m;
  m.iou = iou(c);
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.recall = ratio(c.tp, c.tp + c.fn);
  m.f1 = m.precision + m.recall > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  m.accuracy = ratio(c.tp + c.tn, c.total());
  return m;
}

std::uint64_t CalibrationTable::total() const noexcept {
  std::uint64_t n = 0;
  for (const auto& b : bins) n += b.pixel_count;
  return n;
}

std::size_t calibration_bin(float confidence) {
  const double scaled = std::floor(static_cast<double>(confidence) * 10.0);
  return static_cast<std::size_t>(std::clamp(scaled, 0.0, 9.0));
}

CalibrationTable calibration_table(std::span<const ScoreMap> maps,
                                   std::span<const BinaryMask> truths) {
  check_aligned(maps, truths);
  CalibrationTable table;
  for (std::size_t b = 0; b < kCalibrationBins; ++b) {
    table.bins[b].lower = static_cast<double>(b) / 10.0;
    table.bins[b].upper = static_cast<double>(b + 1) / 10.0;
  }
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const auto s = maps[i].data();
    const auto t = truths[i].data();
    for (std::size_t p = 0; p < s.size(); ++p) {
      auto& bin = table.bins[calibration_bin(s[p])];
      ++bin.pixel_count;
      bin.positive_count += t[p];
    }
  }
  for (auto& b : table.bins) {
    if (b.pixel_count > 0) b.fraction = ratio(b.positive_count, b.pixel_count);
  }
  return table;
}

std::string_view to_string(AucPooling pooling) {
  return pooling == AucPooling::pooled ? "pooled" : "per_image_mean";
}

AucPooling pooling_from_string(std::string_view name) {
  if (name == "pooled") return AucPooling::pooled;
  if (name == "per_image_mean") return AucPooling::per_image_mean;
  throw ValidationError("unknown auc pooling '" + std::string(name) +
                        "', expected pooled or per_image_mean");
}

double auc_of(std::span<const float> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) {
    throw ValidationError("auc: score and label counts differ");
  }
  std::vector<std::uint64_t> keys(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) keys[i] = rank_key(scores[i], labels[i] ? 1 : 0);
  return auc_of_keys(keys, "scope");
}

double auc(std::span<const ScoreMap> maps, std::span<const BinaryMask> truths, AucPooling pooling) {
  check_aligned(maps, truths);
  if (maps.empty()) throw ValidationError("auc: no images");

  const auto keys_of = [&](std::size_t i, std::vector<std::uint64_t>& keys) {
    const auto s = maps[i].data();
    const auto t = truths[i].data();
    for (std::size_t p = 0; p < s.size(); ++p) keys.push_back(rank_key(s[p], t[p]));
  };

  if (pooling == AucPooling::pooled) {
    std::size_t total = 0;
    for (const auto& m : maps) total += m.pixel_count();
    std::vector<std::uint64_t> keys;
    keys.reserve(total);
    for (std::size_t i = 0; i < maps.size(); ++i) keys_of(i, keys);
    return auc_of_keys(keys, "pooled set");
  }

  double sum = 0.0;
  std::vector<std::uint64_t> keys;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    keys.clear();
    keys_of(i, keys);
    sum += auc_of_keys(keys, "image " + std::to_string(i));
  }
  return sum / static_cast<double>(maps.size());
}

std::vector<RocPoint> roc_curve(std::span<const ScoreMap> maps, std::span<const BinaryMask> truths,
                                std::span<const double> thresholds) {
  check_aligned(maps, truths);
  if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
    throw ValidationError("roc: thresholds must be sorted");
  }
  // Histogram by level, then suffix sums give counts at or above each threshold.
  std::vector<std::uint64_t> pos(thresholds.size() + 1, 0);
  std::vector<std::uint64_t> neg(thresholds.size() + 1, 0);
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const auto s = maps[i].data();
    const auto t = truths[i].data();
    for (std::size_t p = 0; p < s.size(); ++p) {
      const std::size_t level = level_of(s[p], thresholds);
      (t[p] ? pos : neg)[level]++;
    }
  }
  std::uint64_t total_pos = 0;
  std::uint64_t total_neg = 0;
  for (std::size_t l = 0; l < pos.size(); ++l) {
    total_pos += pos[l];
    total_neg += neg[l];
  }
  std::vector<RocPoint> out(thresholds.size());
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  for (std::size_t k = thresholds.size(); k-- > 0;) {
    tp += pos[k + 1];
    fp += neg[k + 1];
    out[k] = {thresholds[k], ratio(fp, total_neg), ratio(tp, total_pos)};
  }
  return out;
}

ThresholdGrid::ThresholdGrid() {
  for (int i = 1; i <= 9; ++i) values_.push_back(static_cast<double>(i) / 10.0);
}

ThresholdGrid::ThresholdGrid(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw ValidationError("threshold grid is empty");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] > 0.0 && values_[i] < 1.0)) {
      throw ValidationError("threshold grid values must lie in (0,1)");
    }
    if (i > 0 && !(values_[i] > values_[i - 1])) {
      throw ValidationError("threshold grid must be strictly increasing");
    }
  }
}

IouAResult iou_a(std::span<const ScoreMap> maps, std::span<const BinaryMask> truths,
                 const ThresholdGrid& grid, double default_tau) {
  check_aligned(maps, truths);
  const auto thresholds = grid.values();
  IouAResult result;
  result.per_image.reserve(maps.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const auto s = maps[i].data();
    const auto t = truths[i].data();
    std::vector<std::uint64_t> pos(thresholds.size() + 1, 0);
    std::vector<std::uint64_t> neg(thresholds.size() + 1, 0);
    std::uint64_t positives = 0;
    for (std::size_t p = 0; p < s.size(); ++p) {
      const std::size_t level = level_of(s[p], thresholds);
      (t[p] ? pos : neg)[level]++;
      positives += t[p];
    }

    // Prediction at threshold k is level > k.
    std::vector<Confusion> per_threshold(thresholds.size());
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    for (std::size_t k = thresholds.size(); k-- > 0;) {
      tp += pos[k + 1];
      fp += neg[k + 1];
      per_threshold[k] = {tp, fp, s.size() - positives - fp, positives - tp};
    }

    ImageThresholdRecord rec;
    rec.index = i;
    rec.best_threshold = thresholds[0];
    rec.best_iou = iou(per_threshold[0]);
    for (std::size_t k = 1; k < thresholds.size(); ++k) {
      const double v = iou(per_threshold[k]);
      if (v > rec.best_iou) {
        rec.best_iou = v;
        rec.best_threshold = thresholds[k];
      }
    }
    rec.default_iou = iou(confusion_at(maps[i], truths[i], default_tau));
    sum += rec.best_iou;
    result.per_image.push_back(rec);
  }
  result.iou_a = maps.empty() ? 0.0 : sum / static_cast<double>(maps.size());
  return result;
}

std::vector<GainBin> gain_bins(std::span<const ImageThresholdRecord> records,
                               std::size_t min_samples) {
  std::array<double, kCalibrationBins> sums{};
  std::array<std::size_t, kCalibrationBins> counts{};
  for (const auto& r : records) {
    const double scaled = std::floor(r.default_iou * 10.0);
    const auto b = static_cast<std::size_t>(std::clamp(scaled, 0.0, 9.0));
    sums[b] += r.best_iou - r.default_iou;
    ++counts[b];
  }
  std::vector<GainBin> out;
  for (std::size_t b = 0; b < kCalibrationBins; ++b) {
    if (counts[b] == 0 || counts[b] < min_samples) continue;
    out.push_back({static_cast<double>(b) / 10.0, static_cast<double>(b + 1) / 10.0,
                   sums[b] / static_cast<double>(counts[b]), counts[b]});
  }
  return out;
}

std::vector<GainBin> iou_gain_by_range(std::span<const ScoreMap> maps,
                                       std::span<const BinaryMask> truths,
                                       const ThresholdGrid& grid, double default_tau,
                                       std::size_t min_samples) {
  const auto result = iou_a(maps, truths, grid, default_tau);
  return gain_bins(result.per_image, min_samples);
}

}  // namespace segconf
