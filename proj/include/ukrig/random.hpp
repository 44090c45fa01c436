#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ukrig {

// All stochastic components draw from this engine. Distributions are derived
// by hand below rather than through <random> adaptors, whose output is
// implementation-defined and would break cross-platform reproducibility.
using Rng = std::mt19937_64;

// Hierarchical seed derivation: master -> benchmark -> repetition -> restart.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag);
std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag);

// Uniform in the open interval (0, 1) with 53 random bits.
double uniform_open(Rng& rng);

// Uniform integer in [0, bound).
std::size_t uniform_index(Rng& rng, std::size_t bound);

}  // namespace ukrig
