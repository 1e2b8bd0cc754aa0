#pragma once

#include <cstdint>
#include <random>

namespace hdloc {

using Rng = std::mt19937_64;

/// Seed of substream `index` under `master`. Substreams are a pure function
/// of (master, index), so replications can run in any order on any worker.
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index);

/// The two generators one draw consumes: `core` feeds the Gaussian kernel,
/// `mixing` feeds radial/scale variates. Keeping them apart makes scenarios
/// that share a kernel share its Gaussian draws.
struct DrawStreams {
  explicit DrawStreams(std::uint64_t seed);
  Rng core;
  Rng mixing;
};

}  // namespace hdloc
