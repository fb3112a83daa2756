#include "segconf/netpbm.hpp"

#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>

#include "segconf/error.hpp"

namespace segconf {

namespace {

/// Minimal netpbm header tokenizer: whitespace separated, '#' comments.
class HeaderReader {
public:
  HeaderReader(std::string_view bytes, const std::filesystem::path& origin)
      : bytes_(bytes), origin_(origin) {}

  std::string_view token() {
    skip_space_and_comments();
    const std::size_t start = pos_;
    while (pos_ < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
    if (start == pos_) fail("unexpected end of header");
    return bytes_.substr(start, pos_ - start);
  }

  std::size_t positive_integer(const char* what) {
    const auto tok = token();
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || value == 0) {
      fail(std::string("invalid ") + what + " '" + std::string(tok) + "'");
    }
    return value;
  }

  // Exactly one whitespace byte separates the header from the payload.
  std::string_view payload() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      fail("missing whitespace before payload");
    }
    return bytes_.substr(pos_ + 1);
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw FormatError(origin_, FormatErrorKind::malformed_header, "malformed header: " + what);
  }

private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view bytes_;
  const std::filesystem::path& origin_;
  std::size_t pos_ = 0;
};

void append_le32(std::string& out, float v) {
  const auto bits = std::bit_cast<std::uint32_t>(v);
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<char>((bits >> shift) & 0xFFu));
}

float load32(const char* p, bool little_endian) {
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) {
    const auto byte = static_cast<std::uint32_t>(static_cast<unsigned char>(p[i]));
    bits |= little_endian ? byte << (8 * i) : byte << (8 * (3 - i));
  }
  return std::bit_cast<float>(bits);
}

std::string encode_pfm_plane(std::size_t height, std::size_t width, std::span<const float> data) {
  std::string out = "Pf\n" + std::to_string(width) + " " + std::to_string(height) + "\n-1.0\n";
  out.reserve(out.size() + data.size() * 4);
  for (std::size_t r = height; r-- > 0;) {
    for (std::size_t c = 0; c < width; ++c) append_le32(out, data[r * width + c]);
  }
  return out;
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError(path, "read failed");
  return std::move(ss).str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.close();
  if (!out) throw IoError(path, "write failed");
}

std::string encode_pfm(const ScoreMap& map) {
  return encode_pfm_plane(map.height(), map.width(), map.data());
}

ScoreMap decode_pfm(std::string_view bytes, const std::filesystem::path& origin) {
  HeaderReader header(bytes, origin);
  const auto magic = header.token();
  if (magic == "PF") {
    throw FormatError(origin, FormatErrorKind::unsupported_channels,
                      "unsupported channel count: color PFM (PF) not accepted, expected Pf");
  }
  if (magic != "Pf") header.fail("bad magic '" + std::string(magic) + "'");
  const std::size_t width = header.positive_integer("width");
  const std::size_t height = header.positive_integer("height");

  const auto scale_tok = header.token();
  double scale = 0.0;
  const auto [ptr, ec] = std::from_chars(scale_tok.data(), scale_tok.data() + scale_tok.size(), scale);
  if (ec != std::errc() || ptr != scale_tok.data() + scale_tok.size() || scale == 0.0 ||
      !std::isfinite(scale)) {
    header.fail("invalid scale '" + std::string(scale_tok) + "'");
  }
  const bool little_endian = scale < 0.0;

  const auto payload = header.payload();
  const std::size_t count = width * height;
  if (payload.size() != count * 4) {
    throw FormatError(origin, FormatErrorKind::truncated_payload,
                      "payload is " + std::to_string(payload.size()) + " bytes, expected " +
                          std::to_string(count * 4));
  }

  std::vector<float> data(count);
  for (std::size_t fr = 0; fr < height; ++fr) {
    const std::size_t r = height - 1 - fr;
    for (std::size_t c = 0; c < width; ++c) {
      data[r * width + c] = load32(payload.data() + (fr * width + c) * 4, little_endian);
    }
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::isfinite(data[i])) {
      throw FormatError(origin, FormatErrorKind::non_finite_value,
                        "non-finite value at index " + std::to_string(i));
    }
    if (data[i] < 0.0f || data[i] > 1.0f) {
      throw FormatError(origin, FormatErrorKind::out_of_range_value,
                        "value " + std::to_string(data[i]) + " at index " + std::to_string(i) +
                            " outside [0,1]");
    }
  }
  return ScoreMap(height, width, std::move(data));
}

void write_pfm(const ScoreMap& map, const std::filesystem::path& path) {
  write_file(path, encode_pfm(map));
}

void write_pfm(const Image& image, const std::filesystem::path& path) {
  if (image.channels() != 1) {
    throw ValidationError("write_pfm: expected a single-channel image, got " +
                          std::to_string(image.channels()) + " channels");
  }
  write_file(path, encode_pfm_plane(image.height(), image.width(), image.data()));
}

ScoreMap read_pfm(const std::filesystem::path& path) {
  return decode_pfm(read_file(path), path);
}

std::string encode_pgm(const BinaryMask& mask) {
  std::string out =
      "P5\n" + std::to_string(mask.width()) + " " + std::to_string(mask.height()) + "\n255\n";
  out.reserve(out.size() + mask.pixel_count());
  for (const auto v : mask.data()) out.push_back(static_cast<char>(v ? 255 : 0));
  return out;
}

BinaryMask decode_pgm(std::string_view bytes, const std::filesystem::path& origin) {
  HeaderReader header(bytes, origin);
  const auto magic = header.token();
  if (magic != "P5") header.fail("bad magic '" + std::string(magic) + "'");
  const std::size_t width = header.positive_integer("width");
  const std::size_t height = header.positive_integer("height");
  const std::size_t maxval = header.positive_integer("maxval");
  if (maxval != 255) {
    throw FormatError(origin, FormatErrorKind::bad_maxval,
                      "maxval " + std::to_string(maxval) + " not supported, expected 255");
  }
  const auto payload = header.payload();
  if (payload.size() != width * height) {
    throw FormatError(origin, FormatErrorKind::truncated_payload,
                      "payload is " + std::to_string(payload.size()) + " bytes, expected " +
                          std::to_string(width * height));
  }
  std::vector<std::uint8_t> data(payload.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] = static_cast<unsigned char>(payload[i]) >= 128 ? 1 : 0;
  }
  return BinaryMask(height, width, std::move(data));
}

void write_pgm(const BinaryMask& mask, const std::filesystem::path& path) {
  write_file(path, encode_pgm(mask));
}

BinaryMask read_pgm(const std::filesystem::path& path) {
  return decode_pgm(read_file(path), path);
}

}  // namespace segconf
