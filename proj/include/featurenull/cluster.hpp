#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "featurenull/descriptor.hpp"

namespace featurenull::cluster {

using Centroid = std::array<double, ReducedVec::kDims>;

struct Clustering {
  std::vector<Centroid> centroids;
  std::vector<std::uint32_t> assignments;  // one per input record
  std::vector<std::int64_t> sizes;
  double inertia = 0.0;
  int iterations = 0;
  std::vector<double> inertia_history;  // inertia after each assignment step

  std::size_t k() const noexcept { return centroids.size(); }
};

struct LloydOptions {
  int max_iter = 100;
  double tol = 1e-4;  // on the largest centroid displacement
  unsigned threads = 1;
};

double sq_distance(const ReducedVec& x, const Centroid& c) noexcept;

Centroid to_centroid(const ReducedVec& x) noexcept;

std::size_t count_distinct(std::span<const ReducedVec> data);

/// k-means++ seeding: first centroid uniform, each next drawn with probability
/// proportional to squared distance from the nearest chosen centroid.
/// Throws ArgumentError for k < 1 and DataError when k exceeds the number of
/// distinct points.
std::vector<Centroid> kmeans_pp_seed(std::span<const ReducedVec> data, std::size_t k,
                                     std::uint64_t seed);

/// Nearest centroid by squared Euclidean distance, ties to the lowest index.
std::uint32_t assign(const ReducedVec& x, std::span<const Centroid> centroids) noexcept;

/// Lloyd iterations from `initial`. Empty clusters are reseeded to the point
/// farthest from its centroid. Sums are accumulated in point order, so the
/// result is bitwise identical for any thread count. Throws std::logic_error if
/// inertia ever increases.
Clustering lloyd(std::span<const ReducedVec> data, std::vector<Centroid> initial,
                 const LloydOptions& options = {});

}  // namespace featurenull::cluster
