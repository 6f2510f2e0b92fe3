#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace featurenull {

/// Worker count from FEATURENULL_THREADS, falling back to the number of
/// logical cores. Always >= 1.
unsigned default_threads();

/// Runs body(begin, end) over contiguous chunks of [0, n) on up to `threads`
/// workers. Chunks are disjoint; callers must write only to their own range.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t, std::size_t)>& body);

/// Seeded generator used everywhere randomness appears. std::mt19937_64 has a
/// sequence fixed by the standard, and the helpers below avoid the
/// implementation-defined std:: distributions, so draws reproduce across
/// platforms and standard libraries.
using Rng = std::mt19937_64;

/// Uniform integer in [0, bound) by rejection sampling. bound > 0.
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);

/// Uniform double in [0, 1) with 53 random bits.
double uniform_unit(Rng& rng);

/// Standard normal deviate (Box-Muller, one value per call).
double standard_normal(Rng& rng);

}  // namespace featurenull
