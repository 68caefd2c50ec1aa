#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace nchl {

using Rng = std::mt19937_64;

// Child streams derived from a single run seed. Every random draw in a run
// comes from a generator seeded with derive_seed(root, {stream, indices...}),
// so results never depend on evaluation order or thread count.
enum class Stream : std::uint64_t {
  kInitialPopulation = 1,  // {stream, individual}
  kGeneration = 2,         // {stream, generation}
  kEpisode = 3,            // {stream, episode}: environment reset
  kWeights = 4,            // {stream, episode}: initial weights
  kRandomGenome = 5,       // {stream, index}: baseline genomes
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = splitmix64(root);
  for (std::uint64_t p : path) h = splitmix64(h ^ splitmix64(p));
  return h;
}

inline std::uint64_t derive_seed(std::uint64_t root, Stream stream,
                                 std::uint64_t index) {
  return derive_seed(root, {static_cast<std::uint64_t>(stream), index});
}

}  // namespace nchl
