#pragma once

#include <cstdint>
#include <random>

#include "projstruct/linalg.hpp"

namespace projstruct {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

// Seed for replication `index` of a run with master seed `master`; independent
// of how replications are scheduled across workers.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// Stream-specific seed, e.g. derive_seed(rep_seed, kStreamNoise).
inline constexpr std::uint64_t kStreamNoise = 1;
inline constexpr std::uint64_t kStreamDuplication = 2;
inline constexpr std::uint64_t kStreamSignal = 3;
inline constexpr std::uint64_t kStreamSampling = 4;

Vec standard_normal(Rng& rng, int n);

}  // namespace projstruct
