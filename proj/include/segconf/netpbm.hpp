#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "segconf/grid.hpp"

namespace segconf {

// Portable FloatMap (grayscale "Pf") for score maps and single image planes.
// Written as: "Pf\n<width> <height>\n-1.0\n" followed by little-endian
// float32 rows, bottom row first. The reader accepts either byte order.

std::string encode_pfm(const ScoreMap& map);
ScoreMap decode_pfm(std::string_view bytes, const std::filesystem::path& origin = {});

void write_pfm(const ScoreMap& map, const std::filesystem::path& path);
/// Only single-channel images are accepted.
void write_pfm(const Image& image, const std::filesystem::path& path);
ScoreMap read_pfm(const std::filesystem::path& path);

// Binary PGM ("P5", maxval 255) for masks. 1 is written as 255; on read any
// byte >= 128 is a positive.

std::string encode_pgm(const BinaryMask& mask);
BinaryMask decode_pgm(std::string_view bytes, const std::filesystem::path& origin = {});

void write_pgm(const BinaryMask& mask, const std::filesystem::path& path);
BinaryMask read_pgm(const std::filesystem::path& path);

/// Whole-file helpers; failures raise IoError with the path.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace segconf
