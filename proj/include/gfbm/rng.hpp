#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace gfbm {

std::uint64_t splitmix64(std::uint64_t x);

// Independent generator for (seed, stream, index); reproducible regardless of scheduling.
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

void fill_normal(std::mt19937_64& rng, double* out, std::size_t n);

} // namespace gfbm
