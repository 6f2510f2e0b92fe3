#include "featurenull/reduce.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "featurenull/error.hpp"
#include "featurenull/parallel.hpp"
#include "featurenull/stats.hpp"

namespace featurenull {

std::string Descriptor256::hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(64);
  for (int byte = 0; byte < 32; ++byte) {
    const auto v = static_cast<unsigned>((words_[byte / 8] >> (8 * (byte % 8))) & 0xffu);
    out.push_back(kDigits[v >> 4]);
    out.push_back(kDigits[v & 0xf]);
  }
  return out;
}

}  // namespace featurenull

namespace featurenull::reduce {

ReducedVec reduce_descriptor(const Descriptor256& d) noexcept {
  ReducedVec out;
  for (int g = 0; g < ReducedVec::kDims; ++g) {
    const auto slice = static_cast<std::uint16_t>(d.words()[g / 4] >> (16 * (g % 4)));
    out[g] = static_cast<std::uint8_t>(std::popcount(slice));
  }
  return out;
}

int hamming(const Descriptor256& a, const Descriptor256& b) noexcept {
  int total = 0;
  for (int w = 0; w < 4; ++w) total += std::popcount(a.words()[w] ^ b.words()[w]);
  return total;
}

int sq_euclidean(const ReducedVec& u, const ReducedVec& v) noexcept {
  int total = 0;
  for (int g = 0; g < ReducedVec::kDims; ++g) {
    const int diff = int{u[g]} - int{v[g]};
    total += diff * diff;
  }
  return total;
}

CorrelationReport correlation_experiment(std::int64_t pairs_per_distance, int d_max,
                                         std::uint64_t seed, unsigned threads) {
  if (pairs_per_distance < 100) throw ArgumentError("need at least 100 pairs per distance");
  if (d_max < 1 || d_max > Descriptor256::kBits) throw ArgumentError("d_max must be in [1, 256]");

  const auto per_d = static_cast<std::size_t>(pairs_per_distance);
  std::vector<double> xs(per_d * d_max), ys(per_d * d_max);
  CorrelationReport report;
  report.pairs_per_distance = pairs_per_distance;
  report.rows.resize(d_max);

  parallel_for(static_cast<std::size_t>(d_max), threads, [&](std::size_t begin, std::size_t end) {
    std::array<int, Descriptor256::kBits> positions;
    for (std::size_t di = begin; di < end; ++di) {
      const int d = static_cast<int>(di) + 1;
      Rng rng(seed + static_cast<std::uint64_t>(d));
      double sum = 0.0, sum_sq = 0.0;
      for (std::size_t p = 0; p < per_d; ++p) {
        Descriptor256 a({rng(), rng(), rng(), rng()});
        Descriptor256 b = a;
        // Partial Fisher-Yates: the first d slots become d distinct positions.
        std::iota(positions.begin(), positions.end(), 0);
        for (int k = 0; k < d; ++k) {
          const auto j = k + static_cast<int>(uniform_below(rng, Descriptor256::kBits - k));
          std::swap(positions[k], positions[j]);
          b.flip(positions[k]);
        }
        const double sq = sq_euclidean(reduce_descriptor(a), reduce_descriptor(b));
        xs[di * per_d + p] = d;
        ys[di * per_d + p] = sq;
        sum += sq;
        sum_sq += sq * sq;
      }
      const double n = static_cast<double>(per_d);
      const double m = sum / n;
      report.rows[di] = {d, m, sum_sq / n - m * m};
    }
  });

  const stats::CorrelationResult r = stats::pearson(xs, ys);
  report.rho = r.rho;
  report.p_value = r.p_value;
  return report;
}

void write_distance_csv(const std::filesystem::path& path, const CorrelationReport& report) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "d,mean_sq_euclidean,variance\n";
  char line[96];
  for (const DistanceRow& row : report.rows) {
    std::snprintf(line, sizeof line, "%d,%.17g,%.17g\n", row.hamming, row.mean_sq_euclidean,
                  row.variance);
    out << line;
  }
}

}  // namespace featurenull::reduce
