#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace fwsvm {

// Seedable generator with portable output. std::mt19937_64 is fully specified
// by the standard; the distributions built on top of it here are too, unlike
// the std:: distribution templates whose output varies between library vendors.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::uint64_t uniform_index(std::uint64_t n);

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller (one draw per call, second value discarded).
  double normal();

 private:
  std::mt19937_64 engine_;
};

// splitmix64 finalizer; derives independent stream seeds from a run seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// Moves a uniformly random r-subset of `perm` into perm[0..r) by a partial
// Fisher-Yates pass. `perm` may hold any permutation left by earlier calls.
void partial_shuffle(std::span<std::size_t> perm, std::size_t r, Rng& rng);

}  // namespace fwsvm
