#include "featurenull/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "featurenull/error.hpp"
#include "featurenull/parallel.hpp"

namespace featurenull::cluster {

double sq_distance(const ReducedVec& x, const Centroid& c) noexcept {
  double total = 0.0;
  for (int g = 0; g < ReducedVec::kDims; ++g) {
    const double d = x[g] - c[g];
    total += d * d;
  }
  return total;
}

Centroid to_centroid(const ReducedVec& x) noexcept {
  Centroid c{};
  for (int g = 0; g < ReducedVec::kDims; ++g) c[g] = x[g];
  return c;
}

std::size_t count_distinct(std::span<const ReducedVec> data) {
  std::vector<ReducedVec> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  return static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

std::vector<Centroid> kmeans_pp_seed(std::span<const ReducedVec> data, std::size_t k,
                                     std::uint64_t seed) {
  if (k < 1) throw ArgumentError("k-means needs at least one cluster");
  const std::size_t distinct = count_distinct(data);
  if (k > distinct)
    throw DataError("cannot seed " + std::to_string(k) + " clusters from " +
                    std::to_string(distinct) + " distinct points");

  Rng rng(seed);
  std::vector<Centroid> centroids;
  centroids.reserve(k);
  centroids.push_back(to_centroid(data[uniform_below(rng, data.size())]));

  std::vector<double> nearest(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) nearest[i] = sq_distance(data[i], centroids[0]);

  while (centroids.size() < k) {
    double total = 0.0;
    for (double d : nearest) total += d;
    // total > 0 because fewer than `distinct` centroids have been chosen.
    const double target = uniform_unit(rng) * total;
    double running = 0.0;
    std::size_t chosen = data.size();
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (nearest[i] == 0.0) continue;
      running += nearest[i];
      chosen = i;
      if (running > target) break;
    }
    centroids.push_back(to_centroid(data[chosen]));
    for (std::size_t i = 0; i < data.size(); ++i)
      nearest[i] = std::min(nearest[i], sq_distance(data[i], centroids.back()));
  }
  return centroids;
}

std::uint32_t assign(const ReducedVec& x, std::span<const Centroid> centroids) noexcept {
  std::uint32_t best = 0;
  double best_d = sq_distance(x, centroids[0]);
  for (std::size_t j = 1; j < centroids.size(); ++j) {
    const double d = sq_distance(x, centroids[j]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<std::uint32_t>(j);
    }
  }
  return best;
}

namespace {

// Assigns every point and returns the inertia, summed in point order.
double assign_all(std::span<const ReducedVec> data, std::span<const Centroid> centroids,
                  std::vector<std::uint32_t>& assignments, std::vector<double>& distances,
                  unsigned threads) {
  parallel_for(data.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      assignments[i] = assign(data[i], centroids);
      distances[i] = sq_distance(data[i], centroids[assignments[i]]);
    }
  });
  double inertia = 0.0;
  for (double d : distances) inertia += d;
  return inertia;
}

}  // namespace

Clustering lloyd(std::span<const ReducedVec> data, std::vector<Centroid> initial,
                 const LloydOptions& options) {
  if (initial.empty()) throw ArgumentError("lloyd needs at least one centroid");
  if (options.max_iter < 1) throw ArgumentError("max_iter must be at least 1");
  if (initial.size() > std::numeric_limits<std::uint32_t>::max())
    throw ArgumentError("too many clusters");

  const std::size_t k = initial.size();
  Clustering result;
  result.centroids = std::move(initial);
  result.assignments.assign(data.size(), 0);
  std::vector<double> distances(data.size(), 0.0);
  std::vector<Centroid> sums(k);
  std::vector<std::int64_t> counts(k);

  for (int iter = 1; iter <= options.max_iter; ++iter) {
    const double inertia =
        assign_all(data, result.centroids, result.assignments, distances, options.threads);
    if (!result.inertia_history.empty()) {
      const double previous = result.inertia_history.back();
      if (inertia > previous + 1e-9 * std::max(1.0, previous))
        throw std::logic_error("k-means inertia increased from " + std::to_string(previous) +
                               " to " + std::to_string(inertia));
    }
    result.inertia_history.push_back(inertia);
    result.iterations = iter;

    std::fill(sums.begin(), sums.end(), Centroid{});
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < data.size(); ++i) {
      const std::uint32_t j = result.assignments[i];
      ++counts[j];
      for (int g = 0; g < ReducedVec::kDims; ++g) sums[j][g] += data[i][g];
    }

    double movement = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (counts[j] == 0) continue;
      Centroid next{};
      double shift = 0.0;
      for (int g = 0; g < ReducedVec::kDims; ++g) {
        next[g] = sums[j][g] / static_cast<double>(counts[j]);
        const double d = next[g] - result.centroids[j][g];
        shift += d * d;
      }
      movement = std::max(movement, std::sqrt(shift));
      result.centroids[j] = next;
    }

    // Empty clusters take the point currently farthest from its centroid.
    // Those points are then claimed so the next empty cluster picks another.
    bool reseeded = false;
    for (std::size_t j = 0; j < k; ++j) {
      if (counts[j] != 0) continue;
      std::size_t far = data.size();
      for (std::size_t i = 0; i < data.size(); ++i)
        if (distances[i] > 0.0 && (far == data.size() || distances[i] > distances[far])) far = i;
      if (far == data.size()) continue;
      result.centroids[j] = to_centroid(data[far]);
      distances[far] = 0.0;
      reseeded = true;
    }

    if (!reseeded && movement < options.tol) break;
  }

  result.inertia =
      assign_all(data, result.centroids, result.assignments, distances, options.threads);
  result.sizes.assign(k, 0);
  for (std::uint32_t j : result.assignments) ++result.sizes[j];
  return result;
}

}  // namespace featurenull::cluster
