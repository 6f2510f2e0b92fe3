#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "featurenull/descriptor.hpp"

namespace featurenull::reduce {

/// Component g is the popcount of bits [16g, 16g+15].
ReducedVec reduce_descriptor(const Descriptor256& d) noexcept;

int hamming(const Descriptor256& a, const Descriptor256& b) noexcept;

int sq_euclidean(const ReducedVec& u, const ReducedVec& v) noexcept;

struct DistanceRow {
  int hamming = 0;
  double mean_sq_euclidean = 0.0;
  double variance = 0.0;  // population variance over the pairs at this distance
};

struct CorrelationReport {
  double rho = 0.0;
  double p_value = 1.0;
  std::int64_t pairs_per_distance = 0;
  std::vector<DistanceRow> rows;  // one per hamming distance 1..d_max
};

/// For each d in [1, d_max]: draws `pairs_per_distance` uniform 256-bit
/// vectors, flips d distinct uniformly chosen bits of each to form its
/// partner, and records (d, sq_euclidean of the reduced pair). Returns the
/// Pearson correlation over all records.
///
/// Distance d uses its own generator seeded with seed + d, so the result does
/// not depend on `threads`.
///
/// Throws ArgumentError for pairs_per_distance < 100 or d_max outside
/// [1, 256]; DegenerateInputError when d_max == 1 (hamming has no variance).
CorrelationReport correlation_experiment(std::int64_t pairs_per_distance, int d_max,
                                         std::uint64_t seed, unsigned threads = 1);

/// CSV with header "d,mean_sq_euclidean,variance".
void write_distance_csv(const std::filesystem::path& path, const CorrelationReport& report);

}  // namespace featurenull::reduce
