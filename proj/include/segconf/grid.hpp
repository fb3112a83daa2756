#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace segconf {

/// Single-image segmentation uses the post-event image only; the
/// multi-image task also feeds the earlier pre-event image.
enum class Task { single, multi };

std::string_view to_string(Task task);
Task task_from_string(std::string_view name);

/// Row-major, channel-interleaved float image with values in [0,1].
class Image {
public:
  Image(std::size_t height, std::size_t width, std::size_t channels, std::vector<float> data);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t channels() const noexcept { return channels_; }
  std::size_t pixel_count() const noexcept { return height_ * width_; }
  std::span<const float> data() const noexcept { return data_; }

  float at(std::size_t row, std::size_t col, std::size_t channel = 0) const {
    return data_[(row * width_ + col) * channels_ + channel];
  }

  /// Converts 8-bit samples by dividing by 255.
  static Image from_bytes(std::size_t height, std::size_t width, std::size_t channels,
                          std::span<const std::uint8_t> bytes);

  bool operator==(const Image&) const = default;

private:
  std::size_t height_;
  std::size_t width_;
  std::size_t channels_;
  std::vector<float> data_;
};

/// Per-pixel scores in [0,1]; raw model output or a confidence map.
class ScoreMap {
public:
  ScoreMap(std::size_t height, std::size_t width, std::vector<float> data);

  static ScoreMap filled(std::size_t height, std::size_t width, float value);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t pixel_count() const noexcept { return height_ * width_; }
  std::span<const float> data() const noexcept { return data_; }
  float at(std::size_t row, std::size_t col) const { return data_[row * width_ + col]; }

  bool operator==(const ScoreMap&) const = default;

private:
  std::size_t height_;
  std::size_t width_;
  std::vector<float> data_;
};

/// {0,1} labels. 1 is the positive (landslide) class.
class BinaryMask {
public:
  BinaryMask(std::size_t height, std::size_t width, std::vector<std::uint8_t> data);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t pixel_count() const noexcept { return height_ * width_; }
  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::uint8_t at(std::size_t row, std::size_t col) const { return data_[row * width_ + col]; }
  std::size_t positive_count() const noexcept;

  bool operator==(const BinaryMask&) const = default;

private:
  std::size_t height_;
  std::size_t width_;
  std::vector<std::uint8_t> data_;
};

/// Extracts one channel of an image as a single-plane map.
ScoreMap extract_channel(const Image& image, std::size_t channel);

/// Interleaves equally sized planes into one image.
Image merge_channels(std::span<const ScoreMap> planes);

/// 0/1 mask values as floats.
ScoreMap mask_to_scores(const BinaryMask& mask);

/// One test case. All rasters share height and width.
class Sample {
public:
  Sample(std::string id, Image post_image, std::optional<Image> pre_image, BinaryMask truth);

  const std::string& id() const noexcept { return id_; }
  const Image& post_image() const noexcept { return post_; }
  const std::optional<Image>& pre_image() const noexcept { return pre_; }
  const BinaryMask& truth() const noexcept { return truth_; }
  std::size_t height() const noexcept { return post_.height(); }
  std::size_t width() const noexcept { return post_.width(); }
  bool is_multi_image() const noexcept { return pre_.has_value(); }

  Sample with_id(std::string id) const;
  Sample with_images(Image post_image, std::optional<Image> pre_image) const;

  bool operator==(const Sample&) const = default;

private:
  std::string id_;
  Image post_;
  std::optional<Image> pre_;
  BinaryMask truth_;
};

}  // namespace segconf
