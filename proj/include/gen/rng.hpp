#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace gen {

using Rng = std::mt19937_64;

// Purposes for streams derived from a master seed. Every random decision in a
// run draws from a stream keyed by (seed, purpose, indices...), so results do
// not depend on execution order.
enum class Stream : std::uint64_t {
  kSampling = 1,
  kInit,
  kTrain,
  kValidation,
  kSelection,
  kCrossover,
  kMutation,
  kPadding,
  kLinks,
  kSplit,
  kGraph,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_key(std::uint64_t seed, Stream purpose,
                             std::initializer_list<std::uint64_t> indices = {}) {
  std::uint64_t h = splitmix64(seed ^ 0x6a09e667f3bcc909ULL);
  h = splitmix64(h ^ static_cast<std::uint64_t>(purpose));
  for (std::uint64_t i : indices) h = splitmix64(h ^ i);
  return h;
}

inline Rng make_stream(std::uint64_t seed, Stream purpose,
                       std::initializer_list<std::uint64_t> indices = {}) {
  return Rng(mix_key(seed, purpose, indices));
}

// Uniform on [0,1) from the top 53 bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Counter-based uniform on [0,1): the t-th value of the stream named by key.
inline double keyed_uniform01(std::uint64_t key, std::uint64_t t) {
  return static_cast<double>(splitmix64(key ^ splitmix64(t)) >> 11) * 0x1.0p-53;
}

// Uniform integer on [0, n). Requires n > 0.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  // Rejection sampling against the largest multiple of n.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

}  // namespace gen
