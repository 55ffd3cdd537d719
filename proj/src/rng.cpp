#include "randsmooth/rng.hpp"

#include <boost/random/normal_distribution.hpp>

namespace randsmooth {

std::uint64_t RngStream::below(std::uint64_t n) {
  // 128-bit multiply; reject the biased low region.
  std::uint64_t x = (*this)();
  unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      x = (*this)();
      m = static_cast<unsigned __int128>(x) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double RngStream::normal() {
  // Ziggurat sampler; it keeps no state between calls.
  return boost::random::normal_distribution<double>()(*this);
}

RngStream substream(std::uint64_t seed, std::uint64_t t, std::uint64_t i, StreamTag tag) {
  // Chained mixing of each key component. Mixing is a bijection on 64 bits,
  // so keys that differ in the last component never collide.
  std::uint64_t k = RngStream::mix(seed ^ 0x6A09E667F3BCC909ULL);
  k = RngStream::mix(k ^ static_cast<std::uint64_t>(tag));
  k = RngStream::mix(k + t * 0xD1B54A32D192ED03ULL);
  k = RngStream::mix(k ^ (i + 0x8CB92BA72F3D8DD7ULL));
  return RngStream(k);
}

}  // namespace randsmooth
