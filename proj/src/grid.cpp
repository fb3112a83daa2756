#include "segconf/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "segconf/error.hpp"

namespace segconf {

namespace {

void check_length(const char* what, std::size_t expected, std::size_t actual) {
  if (expected != actual) {
    throw ValidationError(std::string(what) + ": data length " + std::to_string(actual) +
                          " does not match shape (expected " + std::to_string(expected) + ")");
  }
}

void check_unit_range(const char* what, std::span<const float> data) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    const float v = data[i];
    if (!std::isfinite(v)) {
      throw ValidationError(std::string(what) + ": non-finite value at index " + std::to_string(i));
    }
    if (v < 0.0f || v > 1.0f) {
      throw ValidationError(std::string(what) + ": value " + std::to_string(v) + " at index " +
                            std::to_string(i) + " outside [0,1]");
    }
  }
}

}  // namespace

std::string_view to_string(Task task) { return task == Task::multi ? "multi" : "single"; }

Task task_from_string(std::string_view name) {
  if (name == "single") return Task::single;
  if (name == "multi") return Task::multi;
  throw ValidationError("unknown task '" + std::string(name) + "', expected single or multi");
}

Image::Image(std::size_t height, std::size_t width, std::size_t channels, std::vector<float> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
  if (channels != 1 && channels != 3) {
    throw ValidationError("Image: channel count must be 1 or 3, got " + std::to_string(channels));
  }
  check_length("Image", height * width * channels, data_.size());
  check_unit_range("Image", data_);
}

Image Image::from_bytes(std::size_t height, std::size_t width, std::size_t channels,
                        std::span<const std::uint8_t> bytes) {
  std::vector<float> data(bytes.size());
  std::transform(bytes.begin(), bytes.end(), data.begin(),
                 [](std::uint8_t b) { return static_cast<float>(b) / 255.0f; });
  return Image(height, width, channels, std::move(data));
}

ScoreMap::ScoreMap(std::size_t height, std::size_t width, std::vector<float> data)
    : height_(height), width_(width), data_(std::move(data)) {
  check_length("ScoreMap", height * width, data_.size());
  check_unit_range("ScoreMap", data_);
}

ScoreMap ScoreMap::filled(std::size_t height, std::size_t width, float value) {
  return ScoreMap(height, width, std::vector<float>(height * width, value));
}

BinaryMask::BinaryMask(std::size_t height, std::size_t width, std::vector<std::uint8_t> data)
    : height_(height), width_(width), data_(std::move(data)) {
  check_length("BinaryMask", height * width, data_.size());
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (data_[i] > 1) {
      throw ValidationError("BinaryMask: value " + std::to_string(data_[i]) + " at index " +
                            std::to_string(i) + " is not 0 or 1");
    }
  }
}

std::size_t BinaryMask::positive_count() const noexcept {
  return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), std::uint8_t{1}));
}

ScoreMap extract_channel(const Image& image, std::size_t channel) {
  if (channel >= image.channels()) {
    throw ValidationError("extract_channel: channel " + std::to_string(channel) + " out of range");
  }
  const auto src = image.data();
  const std::size_t stride = image.channels();
  std::vector<float> out(image.pixel_count());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = src[i * stride + channel];
  return ScoreMap(image.height(), image.width(), std::move(out));
}

Image merge_channels(std::span<const ScoreMap> planes) {
  if (planes.empty()) throw ValidationError("merge_channels: no planes");
  const std::size_t h = planes.front().height();
  const std::size_t w = planes.front().width();
  for (const auto& p : planes) {
    if (p.height() != h || p.width() != w) {
      throw ValidationError("merge_channels: plane shapes differ");
    }
  }
  const std::size_t c = planes.size();
  std::vector<float> out(h * w * c);
  for (std::size_t k = 0; k < c; ++k) {
    const auto src = planes[k].data();
    for (std::size_t i = 0; i < h * w; ++i) out[i * c + k] = src[i];
  }
  return Image(h, w, c, std::move(out));
}

ScoreMap mask_to_scores(const BinaryMask& mask) {
  std::vector<float> out(mask.data().begin(), mask.data().end());
  return ScoreMap(mask.height(), mask.width(), std::move(out));
}

Sample::Sample(std::string id, Image post_image, std::optional<Image> pre_image, BinaryMask truth)
    : id_(std::move(id)), post_(std::move(post_image)), pre_(std::move(pre_image)),
      truth_(std::move(truth)) {
  if (id_.empty()) throw ValidationError("Sample: empty id");
  const auto same_shape = [&](std::size_t h, std::size_t w) {
    return h == post_.height() && w == post_.width();
  };
  if (pre_ && !same_shape(pre_->height(), pre_->width())) {
    throw ValidationError("Sample " + id_ + ": pre-event image shape differs from post-event image");
  }
  if (!same_shape(truth_.height(), truth_.width())) {
    throw ValidationError("Sample " + id_ + ": truth mask shape differs from post-event image");
  }
}

Sample Sample::with_id(std::string id) const {
  return Sample(std::move(id), post_, pre_, truth_);
}

Sample Sample::with_images(Image post_image, std::optional<Image> pre_image) const {
  return Sample(id_, std::move(post_image), std::move(pre_image), truth_);
}

}  // namespace segconf
