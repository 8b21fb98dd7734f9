#pragma once

#include <cstdint>
#include <limits>

namespace dtq {

/// Deterministic counter-based generator: word i of a stream is a pure
/// function of (key, i), so streams can be split and replayed freely.
/// Satisfies UniformRandomBitGenerator.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed) noexcept;

  /// Independent stream for sample `index`; depends only on (this key, index).
  RandomStream substream(std::uint64_t index) const noexcept;

  std::uint64_t next_word() noexcept;
  bool next_bit() noexcept;
  /// Exactly uniform in [0, bound); bound must be >= 1.
  std::uint64_t uniform_below(std::uint64_t bound) noexcept;

  std::uint64_t operator()() noexcept { return next_word(); }
  static constexpr std::uint64_t min() noexcept { return 0; }
  static constexpr std::uint64_t max() noexcept { return std::numeric_limits<std::uint64_t>::max(); }

  std::uint64_t key() const noexcept { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::uint64_t bits_ = 0;
  int bits_left_ = 0;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace dtq
