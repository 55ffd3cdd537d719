#ifndef RANDSMOOTH_RNG_HPP
#define RANDSMOOTH_RNG_HPP

#include <cstdint>
#include <limits>

namespace randsmooth {

/// Purpose tags keep streams for different uses disjoint.
enum class StreamTag : std::uint64_t {
  sample = 0x5A,      // (component, perturbation) draws inside an iteration
  data = 0xDA7A,      // problem generation
  reference = 0x2EF,  // reference-optimum runs
  test = 0x7E57,
};

/// Counter-based random stream. The state is a 64-bit counter; each draw
/// advances it by a fixed odd increment and returns a SplitMix64 finalisation
/// of the counter, so a stream is fully determined by its key and position.
/// Satisfies UniformRandomBitGenerator. Single-owner.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t key = 0) : counter_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    counter_ += kGolden;
    return mix(counter_);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n), n > 0 (Lemire's multiply-shift with rejection).
  std::uint64_t below(std::uint64_t n);

  /// Standard normal (ziggurat). Stateless between calls, so the value
  /// depends only on the stream position.
  double normal();

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
  std::uint64_t counter_;
};

/// Stream keyed by (seed, iteration t, sample index i, tag). Identical keys
/// give identical draws no matter which thread or in which order they run.
RngStream substream(std::uint64_t seed, std::uint64_t t, std::uint64_t i, StreamTag tag);

}  // namespace randsmooth

#endif
