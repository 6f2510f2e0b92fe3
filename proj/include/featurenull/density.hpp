#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "featurenull/cluster.hpp"
#include "featurenull/descriptor.hpp"
#include "featurenull/orb.hpp"

namespace featurenull::density {

inline constexpr std::uint32_t kModelVersion = 1;

struct ModelMeta {
  std::int64_t n = 0;        // records the model was fitted on
  std::int64_t created = 0;  // seconds since the Unix epoch
  std::uint32_t version = kModelVersion;
  friend bool operator==(const ModelMeta&, const ModelMeta&) = default;
};

/// Mixture of per-cluster independent categoricals over the 16 reduced
/// components. Immutable after fit; log_prob is safe to call concurrently.
struct DensityModel {
  static constexpr int kDims = ReducedVec::kDims;
  static constexpr int kCategories = ReducedVec::kCategories;

  std::vector<double> log_weights;  // ln p(C_j)
  std::vector<double> log_tables;   // ln p(x_i = a | C_j) at [(j * 16 + i) * 17 + a]
  std::vector<cluster::Centroid> centroids;
  orb::OrbParams orb;
  orb::BriefPattern pattern;
  ModelMeta meta;

  std::size_t k() const noexcept { return log_weights.size(); }

  double log_table(std::size_t j, int i, int a) const noexcept {
    return log_tables[(j * kDims + i) * kCategories + a];
  }

  friend bool operator==(const DensityModel&, const DensityModel&) = default;
};

struct FitOptions {
  /// Keep empty clusters with weight -inf instead of rejecting them.
  bool tolerate_empty = false;
  std::int64_t created = 0;
};

/// log_weights[j] = ln(|C_j| / N); log_tables = ln((count + 1) / (|C_j| + 17)).
/// Throws DataError when data is empty or an empty cluster is present without
/// tolerate_empty, ArgumentError when assignments do not cover the data.
DensityModel fit(std::span<const ReducedVec> data, const cluster::Clustering& clustering,
                 const orb::BriefPattern& pattern, const orb::OrbParams& orb_params,
                 const FitOptions& options = {});

/// ln sum exp(v), factoring out the maximum. Throws ArgumentError when empty.
double log_sum_exp(std::span<const double> values);

/// ln p(x). Throws ArgumentError for a component outside [0, 16].
double log_prob(const DensityModel& model, const ReducedVec& x);

/// Little-endian binary, magic "FNDM". Round trip is bit-exact.
void save_model(const DensityModel& model, const std::filesystem::path& path);

/// Throws FormatError (BadMagic, VersionMismatch, Truncated, Invalid, Io).
DensityModel load_model(const std::filesystem::path& path);

/// CSV "cluster,weight".
void write_weights_csv(const std::filesystem::path& path, const DensityModel& model);

}  // namespace featurenull::density
