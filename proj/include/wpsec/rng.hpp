#pragma once

#include <array>
#include <complex>
#include <cstdint>

namespace wpsec {

/// Philox4x32-10 counter-based generator (Salmon, Moraes, Dror, Shaw,
/// "Parallel random numbers: as easy as 1, 2, 3", SC 2011).
///
/// The 64-bit seed is the key; the 128-bit counter is split into a 64-bit
/// stream id (high half) and a 64-bit block index (low half), so draw i of
/// stream s is a pure function of (seed, s, i) on every platform.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  using Block = std::array<std::uint32_t, 4>;

  explicit Philox4x32(std::uint64_t seed, std::uint64_t stream = 0);

  /// The raw bijection: ten rounds of Philox on (counter, key).
  static Block encrypt(Block counter, std::array<std::uint32_t, 2> key);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return 0xFFFFFFFFu; }
  result_type operator()();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Circularly-symmetric complex normal CN(0, 1) by Box-Muller on one block.
  std::complex<double> complex_normal();
  /// Standard real normal (one Box-Muller branch per block).
  double normal();

 private:
  Block next_block();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t index_ = 0;
  Block buffer_{};
  int used_ = 4;
};

}  // namespace wpsec
