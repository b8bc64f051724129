#pragma once

#include <cstdint>
#include <random>

namespace pulsega {

/// Operation tags used to split the random stream.
enum class StreamTag : std::uint64_t {
  Init = 1,
  Select = 2,
  Crossover = 3,
  Flip = 4,
  Mutate = 5,
  Operator = 6,
  Local = 7,
  Test = 99,
};

/// Mixes (seed, generation, member, tag) into an independent 64-bit seed.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t generation, std::uint64_t member, StreamTag tag);

/// Random stream keyed by (seed, generation, member, tag). Streams with any
/// differing key are independent; the same key always yields the same draws.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t generation, std::uint64_t member, StreamTag tag)
      : engine_(stream_seed(seed, generation, member, tag)) {}
  explicit Stream(std::uint64_t raw_seed) : engine_(raw_seed) {}

  /// Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  /// Uniform real in [0, 1).
  double uniform01();

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pulsega
