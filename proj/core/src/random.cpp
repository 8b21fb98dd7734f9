#include "dtq/random.hpp"

#include <bit>

namespace dtq {

namespace {
constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kSplit = 0xd1b54a32d192ed03ULL;
}  // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t seed) noexcept : key_(mix64(seed + kGamma)) {}

RandomStream RandomStream::substream(std::uint64_t index) const noexcept {
  RandomStream child(0);
  child.key_ = mix64(key_ ^ mix64((index + 1) * kSplit));
  return child;
}

std::uint64_t RandomStream::next_word() noexcept {
  ++counter_;
  return mix64(key_ + counter_ * kGamma);
}

bool RandomStream::next_bit() noexcept {
  if (bits_left_ == 0) {
    bits_ = next_word();
    bits_left_ = 64;
  }
  const bool bit = bits_ & 1U;
  bits_ >>= 1;
  --bits_left_;
  return bit;
}

std::uint64_t RandomStream::uniform_below(std::uint64_t bound) noexcept {
  if (bound <= 1) return 0;
  const std::uint64_t mask = ~std::uint64_t{0} >> std::countl_zero(bound - 1);
  for (;;) {
    const std::uint64_t draw = next_word() & mask;
    if (draw < bound) return draw;
  }
}

}  // namespace dtq
