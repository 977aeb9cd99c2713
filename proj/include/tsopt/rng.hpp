#pragma once

#include <cstdint>
#include <random>

namespace tsopt {

// splitmix64 finalizer. Stable across platforms; part of the reproducibility
// contract together with the FEATV1 byte layout.
std::uint64_t mix64(std::uint64_t x);

// Child stream derivation: disturbances, corpus generation and Monte-Carlo
// harnesses key per-item streams off (seed, index) so that parallel and
// serial execution orders draw identical values.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t i, std::uint64_t j);

// All randomness flows through this front end. The distributions are spelled
// out here instead of std::*_distribution because the standard leaves those
// algorithms implementation-defined and results must not drift between
// standard libraries.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01();

  // Standard normal via Box-Muller; the paired draw is cached.
  double normal();

  // Uniform integer on [0, n), n >= 1. Rejection sampled, unbiased.
  std::uint64_t below(std::uint64_t n);

private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace tsopt
