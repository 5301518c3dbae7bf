#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "msl/common.hpp"

namespace msl {

using Rng = std::mt19937_64;

// SplitMix64 finaliser; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Seed for a named sub-stream, e.g. derive_seed(seed, {stage, chunk}).
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept;

// Uniform point on the unit sphere S^{d-1} (normalised Gaussian).
Point uniform_on_sphere(int d, Rng& rng);

// Uniform point in the unit ball of R^k.
Point uniform_in_ball(int k, Rng& rng);

}  // namespace msl
