#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace wigchar {

/// Philox4x32-10 counter-based block cipher (Salmon et al., SC'11).
/// Maps a 128-bit counter and a 64-bit key to 128 pseudo-random bits.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter encrypt(Counter counter, Key key) noexcept;
};

/// What a stream is used for; part of the stream key so that purposes never collide.
enum class StreamPurpose : std::uint32_t {
  InitialEntries = 1,
  Increments = 2,
  Reference = 3,
  Bootstrap = 4,
  ScalarPath = 5,
  Auxiliary = 6,
};

/// Identifies one independent stream: (seed, trial, purpose, block).
/// `block` is typically a time-step index, so replaying step k of trial j
/// never depends on how many numbers other steps consumed.
struct StreamId {
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
  StreamPurpose purpose = StreamPurpose::Auxiliary;
  std::uint64_t block = 0;
};

/// Sequential view of a Philox stream. Satisfies UniformRandomBitGenerator.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(const StreamId& id) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() noexcept;

  /// Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal() noexcept;

 private:
  void refill() noexcept;

  Philox4x32::Key key_{};
  std::uint64_t index_ = 0;
  std::uint64_t block_ = 0;
  Philox4x32::Counter buffer_{};
  int buffered_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace wigchar
