#pragma once

#include <cstdint>
#include <random>

namespace bingo {

/// splitmix64 step; the de-facto standard seed expander.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based seed derivation: one master seed fans out into independent
/// per-stream, per-counter seeds, so results do not depend on execution order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t counter) {
  std::uint64_t s = master;
  (void)splitmix64(s);
  s ^= stream * 0xd6e8feb86659fd93ULL;
  (void)splitmix64(s);
  s ^= counter;
  return splitmix64(s);
}

/// Named sub-streams of the master seed.
enum Stream : std::uint64_t {
  kStreamEnv = 1,       // per-episode environment randomness
  kStreamPolicy = 2,    // per-episode action sampling
  kStreamReference = 3, // frozen-reference rollouts
  kStreamEval = 4,      // final frozen-policy evaluation
  kStreamShuffle = 5,   // minibatch shuffling
  kStreamOracle = 6,    // synthetic oracle batches (analysis)
};

/// Uniform double in [0, 1) from a 64-bit engine, with explicit bit handling
/// so the mapping is stable across standard-library implementations.
inline double canonical(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

}  // namespace bingo
