#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace cpppkit {

/// Philox4x32-10 counter-based generator.
///
/// A stream is identified by (seed, stream_id): the seed is the 64-bit key and
/// the stream id occupies the upper two counter words, so every stream owns a
/// disjoint 2^64-block counter space. Two workers holding streams with
/// different ids never share state, which is what makes replicate results
/// independent of the worker count.
///
/// Satisfies UniformRandomBitGenerator and can be handed to <random>
/// distributions directly.
class RandomStream {
public:
  using result_type = std::uint64_t;

  RandomStream() : RandomStream(0, 0) {}
  RandomStream(std::uint64_t seed, std::uint64_t stream_id) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] std::uint64_t stream_id() const noexcept { return stream_id_; }

  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  /// The raw bijection; exposed for known-answer tests.
  static Block philox(Block counter, Key key) noexcept;

private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_index_ = 0;
  Block buffer_{};
  int used_ = 2;  // 64-bit outputs consumed from buffer_, 0..2
};

/// Top byte of a stream id names what the stream is for; the rest is an index.
enum class StreamPurpose : std::uint8_t {
  real_chain = 1,
  predictive = 2,
  selection = 3,
  replicate = 4,
  bootstrap_mbb = 5,
  bootstrap_normal = 6,
  repeat = 7,
  simulation = 8,
};

constexpr std::uint64_t stream_id(StreamPurpose purpose, std::uint64_t index = 0) noexcept {
  return (static_cast<std::uint64_t>(purpose) << 56) | (index & ((std::uint64_t{1} << 56) - 1));
}

/// Mixes (seed, index) into a fresh 64-bit seed (splitmix64 finalizer).
/// Used where a whole pipeline, not just a stream, must be re-seeded.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

}  // namespace cpppkit
