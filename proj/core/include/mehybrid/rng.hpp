#pragma once

#include <array>
#include <cstdint>

namespace mehybrid {

/// Philox4x32-10 counter-based generator, as in Random123. A (key, counter) pair maps to four
/// independent 32-bit words, so any block of the stream can be produced
/// without generating its predecessors.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit constexpr Philox4x32(std::uint64_t key)
      : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)} {}

  constexpr Counter operator()(Counter ctr) const {
    Key k = key_;
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ k[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ k[1], static_cast<std::uint32_t>(p0)};
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    return ctr;
  }

  /// Two doubles from one block, each on the open grid
  /// {(2j+1)/2^52 - 1 : 0 <= j < 2^52}, i.e. strictly inside (-1, 1).
  std::array<double, 2> symmetric_pair(std::uint64_t counter) const {
    const Counter out = (*this)({static_cast<std::uint32_t>(counter),
                                 static_cast<std::uint32_t>(counter >> 32), 0u, 0u});
    const std::uint64_t a = (std::uint64_t{out[0]} << 32) | out[1];
    const std::uint64_t b = (std::uint64_t{out[2]} << 32) | out[3];
    return {to_symmetric(a), to_symmetric(b)};
  }

  static double to_symmetric(std::uint64_t bits) {
    const std::uint64_t j = bits >> 12;  // 52 bits
    return static_cast<double>(2 * j + 1) * 0x1p-52 - 1.0;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  Key key_;
};

}  // namespace mehybrid
