#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace featurenull {

/// 256-bit steered-BRIEF string. Bit i lives in word i / 64 at position i % 64.
class Descriptor256 {
public:
  static constexpr int kBits = 256;

  constexpr Descriptor256() = default;
  explicit constexpr Descriptor256(std::array<std::uint64_t, 4> words) : words_(words) {}

  bool test(int i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(int i, bool value = true) noexcept {
    const std::uint64_t mask = std::uint64_t{1} << (i & 63);
    if (value)
      words_[i >> 6] |= mask;
    else
      words_[i >> 6] &= ~mask;
  }
  void flip(int i) noexcept { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

  Descriptor256 complement() const noexcept {
    return Descriptor256({~words_[0], ~words_[1], ~words_[2], ~words_[3]});
  }

  const std::array<std::uint64_t, 4>& words() const noexcept { return words_; }

  /// 64 lowercase hex digits, byte k (bits 8k..8k+7) first.
  std::string hex() const;

  friend bool operator==(const Descriptor256&, const Descriptor256&) = default;

private:
  std::array<std::uint64_t, 4> words_{};
};

/// Popcount-reduced descriptor: 16 components, each the number of set bits in
/// one 16-bit slice, so each lies in [0, 16].
struct ReducedVec {
  static constexpr int kDims = 16;
  static constexpr int kCategories = 17;

  std::array<std::uint8_t, kDims> components{};

  std::uint8_t operator[](int g) const noexcept { return components[g]; }
  std::uint8_t& operator[](int g) noexcept { return components[g]; }

  friend bool operator==(const ReducedVec&, const ReducedVec&) = default;
  friend auto operator<=>(const ReducedVec&, const ReducedVec&) = default;
};

}  // namespace featurenull
