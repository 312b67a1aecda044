#pragma once

#include <array>
#include <cstdint>

namespace levelfit {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123). The
/// output is a pure function of (counter, key), so streams can be split over
/// index ranges without changing any drawn value.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }

  static Key key_from_seed(std::uint64_t seed) {
    return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// Two 32-bit words to a double in [0, 1) with 53 random bits.
inline double unit_double(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 21) ^ (lo >> 11);
  return static_cast<double>(bits & ((1ull << 53) - 1)) * 0x1.0p-53;
}

/// Uniform [0,1) coordinate `axis` of sample `index` in stream `stream`.
/// Each Philox block yields two coordinates.
inline double uniform_coordinate(std::uint64_t seed, std::uint64_t stream, std::uint64_t index, int axis) {
  const auto block = static_cast<std::uint32_t>(axis / 2);
  const Philox4x32::Counter ctr = {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), block,
                                   static_cast<std::uint32_t>(stream)};
  const auto out = Philox4x32::generate(ctr, Philox4x32::key_from_seed(seed));
  return axis % 2 == 0 ? unit_double(out[0], out[1]) : unit_double(out[2], out[3]);
}

}  // namespace levelfit
