#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace bellsim {

/// Counter-based pseudorandom stream with named substreams.
///
/// Draw i is a pure function of (seed, label, i): the stream walks the
/// SplitMix64 sequence, so values can be generated in any order, from any
/// thread, and are bit-identical across platforms. Substreams with distinct
/// labels are decorrelated by hashing the label into the stream base.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::string_view label)
      : base_(derive_base(seed, label)) {}

  /// 64 pseudorandom bits for draw `index`.
  std::uint64_t bits(std::uint64_t index) const {
    return finalize(base_ + (index + 1) * kGamma);
  }

  /// Uniform double in [0, 1): top 53 bits of the draw scaled by 2^-53.
  double uniform(std::uint64_t index) const {
    return static_cast<double>(bits(index) >> 11) * 0x1.0p-53;
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

  // SplitMix64 output function (Steele, Lea & Flood; Vigna's constants).
  static constexpr std::uint64_t finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // FNV-1a, 64-bit.
  static constexpr std::uint64_t hash_label(std::string_view label) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : label) {
      h ^= c;
      h *= 0x100000001B3ull;
    }
    return h;
  }

  static constexpr std::uint64_t derive_base(std::uint64_t seed,
                                             std::string_view label) {
    return finalize(finalize(seed + kGamma) ^ hash_label(label));
  }

  std::uint64_t base_;
};

/// Label for the i-th substream of a family, e.g. point_label("point", 3).
inline std::string point_label(std::string_view family, std::uint64_t index) {
  return std::string(family) + "/" + std::to_string(index);
}

}  // namespace bellsim
