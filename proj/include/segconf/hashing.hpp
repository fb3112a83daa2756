#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace segconf {

/// SplitMix64 finalizer. Used as a counter-based generator: mixing a key
/// yields an independent 64-bit stream position.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Derives the key for stream `index` under `seed`.
constexpr std::uint64_t split_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(seed) ^ index);
}

/// Top 53 bits as a double in [0,1).
constexpr double unit_double(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// FNV-1a, 64-bit.
constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  return h;
}

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view bytes);

}  // namespace segconf
