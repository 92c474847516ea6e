#pragma once

// Portable seeded randomness.
//
// Bits come from std::mt19937_64, whose output sequence is fixed by the C++
// standard. The distributions on top are implemented here rather than taken
// from <random> (whose distributions are implementation-defined), so a seed
// reproduces the same splits, bootstrap samples and perturbations everywhere:
//
//   uniform_index(b): draw r until r >= (2^64 - b) mod b, return r mod b
//   uniform01():      (r >> 11) * 2^-53
//   normal():         Box-Muller on u1 = 1 - uniform01(), u2 = uniform01();
//                     both outputs of each pair are used, cosine first
//   shuffle():        Fisher-Yates, i from n-1 down to 1, j = uniform_index(i+1)

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace ixai {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  std::size_t uniform_index(std::size_t bound);
  double uniform01();
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

void shuffle(std::span<std::size_t> values, Rng& rng);

// SplitMix64 finalizer; derives independent stream seeds from a base seed.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream);

std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t fnv1a64(std::span<const double> values);

}  // namespace ixai
