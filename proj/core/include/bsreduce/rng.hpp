#pragma once

#include <array>
#include <cstdint>

namespace bsreduce {

/// Philox4x32-10 block function (Salmon et al., Random123).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85;
};

/// Random stream for one Monte Carlo path. The stream is a pure function of
/// (seed, path), so a path draws the same numbers however the paths are
/// split across workers.
class PathStream {
 public:
  PathStream(std::uint64_t seed, std::uint64_t path) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        path_(path) {}

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform() noexcept {
    if (cached_) {
      cached_ = false;
      return spare_;
    }
    const auto out = Philox4x32::block(
        {block_++, 0u, static_cast<std::uint32_t>(path_), static_cast<std::uint32_t>(path_ >> 32)},
        key_);
    spare_ = to_unit(out[2], out[3]);
    cached_ = true;
    return to_unit(out[0], out[1]);
  }

  /// Standard normal by inversion.
  double normal();

 private:
  static double to_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
    const std::uint64_t bits = (std::uint64_t{hi} >> 5) << 26 | (lo >> 6);
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  Philox4x32::Key key_;
  std::uint64_t path_;
  std::uint32_t block_ = 0;
  double spare_ = 0.0;
  bool cached_ = false;
};

}  // namespace bsreduce
