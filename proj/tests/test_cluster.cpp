#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "featurenull/cluster.hpp"
#include "featurenull/error.hpp"
#include "featurenull/parallel.hpp"
#include "oracles.hpp"

using namespace featurenull;
using cluster::Centroid;

namespace {

ReducedVec vec(std::initializer_list<int> head) {
  ReducedVec v;
  int g = 0;
  for (int x : head) v[g++] = static_cast<std::uint8_t>(x);
  return v;
}

std::vector<ReducedVec> random_points(Rng& rng, std::size_t n, int spread) {
  std::vector<ReducedVec> pts(n);
  for (auto& p : pts)
    for (int g = 0; g < 16; ++g) p[g] = static_cast<std::uint8_t>(uniform_below(rng, spread + 1));
  return pts;
}

}  // namespace

TEST_CASE("assign picks the nearest centroid, ties to the lowest index") {
  std::vector<Centroid> cs(9);
  for (int j = 0; j < 9; ++j) cs[j].fill(j);
  CHECK(cluster::assign(vec({}), cs) == 0);
  ReducedVec seven;
  seven.components.fill(7);
  CHECK(cluster::assign(seven, cs) == 7);

  std::vector<Centroid> tie(6);
  tie[2][0] = 2.0;
  tie[5][0] = -2.0;
  for (int j : {0, 1, 3, 4}) tie[j].fill(9.0);
  CHECK(cluster::assign(vec({}), tie) == 2);
  CHECK(cluster::assign(seven, std::vector<Centroid>(1)) == 0);
}

TEST_CASE("seeding examples") {
  const std::vector<ReducedVec> two{vec({1, 2}), vec({5, 5, 5})};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto cs = cluster::kmeans_pp_seed(two, 2, seed);
    REQUIRE(cs.size() == 2);
    CHECK(cs[0] != cs[1]);
    for (const auto& c : cs) CHECK((c == cluster::to_centroid(two[0]) || c == cluster::to_centroid(two[1])));
  }

  Rng rng(4);
  const auto pts = random_points(rng, 50, 16);
  const auto one = cluster::kmeans_pp_seed(pts, 1, 77);
  REQUIRE(one.size() == 1);
  CHECK(std::any_of(pts.begin(), pts.end(), [&](const ReducedVec& p) { return cluster::to_centroid(p) == one[0]; }));

  CHECK(cluster::kmeans_pp_seed(pts, 10, 3) == cluster::kmeans_pp_seed(pts, 10, 3));
  CHECK(cluster::kmeans_pp_seed(pts, 10, 3) != cluster::kmeans_pp_seed(pts, 10, 4));
}

TEST_CASE("seeding needs enough distinct points") {
  const std::vector<ReducedVec> dup{vec({1}), vec({1}), vec({2}), vec({1})};
  CHECK(cluster::count_distinct(dup) == 2);
  CHECK(cluster::kmeans_pp_seed(dup, 2, 1).size() == 2);
  CHECK_THROWS_AS(cluster::kmeans_pp_seed(dup, 3, 1), DataError);
  CHECK_THROWS_AS(cluster::kmeans_pp_seed(dup, 0, 1), ArgumentError);
}

TEST_CASE("lloyd at a fixed point") {
  const std::vector<ReducedVec> pts{vec({1}), vec({4, 4}), vec({0, 0, 9})};
  std::vector<Centroid> init;
  for (const auto& p : pts) init.push_back(cluster::to_centroid(p));
  const auto c = cluster::lloyd(pts, init);
  CHECK(c.iterations == 1);
  CHECK(c.inertia == 0.0);
  CHECK(c.assignments == std::vector<std::uint32_t>{0, 1, 2});
}

TEST_CASE("lloyd recovers two separated pairs") {
  const std::vector<ReducedVec> pts{vec({0, 0}), vec({2, 0}), vec({14, 16}), vec({16, 16})};
  const auto c = cluster::lloyd(pts, cluster::kmeans_pp_seed(pts, 2, 5));
  const double opt = oracles::optimal_inertia(pts, 2);
  CHECK(opt == 4.0);
  CHECK(c.inertia == opt);
  std::vector<Centroid> cs = c.centroids;
  std::sort(cs.begin(), cs.end());
  CHECK(cs[0][0] == 1.0);
  CHECK(cs[0][1] == 0.0);
  CHECK(cs[1][0] == 15.0);
  CHECK(cs[1][1] == 16.0);
}

TEST_CASE("as many clusters as distinct points gives zero inertia") {
  Rng rng(6);
  auto pts = random_points(rng, 8, 3);
  pts.push_back(pts[0]);
  pts.push_back(pts[3]);
  const std::size_t k = cluster::count_distinct(pts);
  const auto c = cluster::lloyd(pts, cluster::kmeans_pp_seed(pts, k, 1));
  CHECK(c.inertia == 0.0);
}

TEST_CASE("clustering invariants and monotone inertia") {
  Rng rng(10);
  for (int trial = 0; trial < 30; ++trial) {
    const auto pts = random_points(rng, 40 + trial * 7, 2 + trial % 10);
    const std::size_t k = std::min<std::size_t>(1 + trial % 9, cluster::count_distinct(pts));
    const auto c = cluster::lloyd(pts, cluster::kmeans_pp_seed(pts, k, trial), {25, 1e-4, 1});
    REQUIRE(c.assignments.size() == pts.size());
    std::vector<std::int64_t> sizes(k, 0);
    double inertia = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      ++sizes[c.assignments[i]];
      inertia += cluster::sq_distance(pts[i], c.centroids[c.assignments[i]]);
    }
    CHECK(sizes == c.sizes);
    CHECK(inertia == doctest::Approx(c.inertia).epsilon(1e-12));
    for (std::size_t i = 1; i < c.inertia_history.size(); ++i)
      CHECK(c.inertia_history[i] <= c.inertia_history[i - 1] + 1e-9);
    CHECK(c.inertia <= c.inertia_history.back() + 1e-9);
  }
}

TEST_CASE("small instances are near the exhaustive optimum") {
  Rng rng(12);
  for (int trial = 0; trial < 24; ++trial) {
    const std::size_t n = 6 + trial % 7;
    const int k = 2 + trial % 2;
    auto pts = random_points(rng, n, 8);
    const double opt = oracles::optimal_inertia(pts, k);
    const auto c = cluster::lloyd(pts, cluster::kmeans_pp_seed(pts, k, 100 + trial));
    CHECK(c.inertia >= opt - 1e-9);
    CHECK(c.inertia <= 1.5 * opt + 1e-9);
  }
}

TEST_CASE("empty clusters are reseeded") {
  const std::vector<ReducedVec> pts{vec({0}), vec({1}), vec({10}), vec({11})};
  std::vector<Centroid> init(2);
  init[1].fill(100.0);
  const auto c = cluster::lloyd(pts, init);
  CHECK(c.sizes[0] > 0);
  CHECK(c.sizes[1] > 0);
  CHECK(c.inertia == 1.0);
}

TEST_CASE("lloyd is identical across thread counts") {
  Rng rng(21);
  const auto pts = random_points(rng, 5000, 16);
  const auto init = cluster::kmeans_pp_seed(pts, 40, 9);
  const auto a = cluster::lloyd(pts, init, {30, 1e-4, 1});
  const auto b = cluster::lloyd(pts, init, {30, 1e-4, 4});
  CHECK(a.assignments == b.assignments);
  CHECK(a.centroids == b.centroids);
  CHECK(a.inertia == b.inertia);
  CHECK(a.inertia_history == b.inertia_history);
}

TEST_CASE("lloyd argument checks") {
  const std::vector<ReducedVec> pts{vec({1})};
  CHECK_THROWS_AS(cluster::lloyd(pts, {}), ArgumentError);
  CHECK_THROWS_AS(cluster::lloyd(pts, std::vector<Centroid>(1), {0, 1e-4, 1}), ArgumentError);
}
