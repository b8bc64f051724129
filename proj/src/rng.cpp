#include "pulsega/rng.hpp"

#include <stdexcept>

namespace pulsega {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t generation, std::uint64_t member, StreamTag tag) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ generation);
  h = splitmix64(h ^ member);
  h = splitmix64(h ^ static_cast<std::uint64_t>(tag));
  return h;
}

// Both draws are written out rather than using std::*_distribution so the
// sequences do not depend on the standard library implementation.
std::int64_t Stream::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(engine_());
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return lo + static_cast<std::int64_t>(x % span);
}

double Stream::uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

}  // namespace pulsega
