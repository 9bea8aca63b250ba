#pragma once
#include <cstdint>
#include <random>

namespace irml {

using Rng = std::mt19937_64;

// SplitMix64 mixing step.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Decorrelated stream seed for stream `index` of a base seed.  Index 0 keeps
// the base seed itself so a one-stream run and the first stream of a
// multi-stream run consume identical randomness.
inline uint64_t derive_seed(uint64_t base, uint64_t index) {
  return index == 0 ? base : splitmix64(base ^ (0x9e3779b97f4a7c15ULL * index));
}

}  // namespace irml
