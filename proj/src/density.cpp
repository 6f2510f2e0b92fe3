#include "featurenull/density.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

#include "featurenull/error.hpp"

namespace featurenull::density {

DensityModel fit(std::span<const ReducedVec> data, const cluster::Clustering& clustering,
                 const orb::BriefPattern& pattern, const orb::OrbParams& orb_params,
                 const FitOptions& options) {
  if (data.empty()) throw DataError("cannot fit a density model to zero records");
  if (clustering.assignments.size() != data.size())
    throw ArgumentError("cluster assignments do not cover the data");
  const std::size_t k = clustering.k();
  if (k == 0) throw ArgumentError("clustering has no centroids");

  constexpr int dims = DensityModel::kDims;
  constexpr int cats = DensityModel::kCategories;
  std::vector<std::int64_t> sizes(k, 0);
  std::vector<std::int64_t> counts(k * dims * cats, 0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::uint32_t j = clustering.assignments[i];
    if (j >= k) throw ArgumentError("cluster assignment out of range");
    ++sizes[j];
    for (int g = 0; g < dims; ++g) {
      if (data[i][g] >= cats) throw ArgumentError("reduced component outside [0, 16]");
      ++counts[(j * dims + g) * cats + data[i][g]];
    }
  }

  DensityModel model;
  model.orb = orb_params;
  model.pattern = pattern;
  model.centroids = clustering.centroids;
  model.meta.n = static_cast<std::int64_t>(data.size());
  model.meta.created = options.created;
  model.log_weights.resize(k);
  model.log_tables.resize(k * dims * cats);

  const double n = static_cast<double>(data.size());
  for (std::size_t j = 0; j < k; ++j) {
    if (sizes[j] == 0 && !options.tolerate_empty)
      throw DataError("cluster " + std::to_string(j) + " is empty");
    model.log_weights[j] = sizes[j] == 0 ? -std::numeric_limits<double>::infinity()
                                         : std::log(static_cast<double>(sizes[j]) / n);
    const double denom = static_cast<double>(sizes[j] + cats);
    for (std::size_t cell = j * dims * cats; cell < (j + 1) * dims * cats; ++cell)
      model.log_tables[cell] = std::log(static_cast<double>(counts[cell] + 1) / denom);
  }
  return model;
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) throw ArgumentError("log-sum-exp of an empty list");
  const double m = *std::max_element(values.begin(), values.end());
  if (std::isinf(m)) return m;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - m);
  return m + std::log(sum);
}

double log_prob(const DensityModel& model, const ReducedVec& x) {
  for (int g = 0; g < DensityModel::kDims; ++g)
    if (x[g] >= DensityModel::kCategories)
      throw ArgumentError("reduced component outside [0, 16]");

  std::vector<double> h(model.k());
  for (std::size_t j = 0; j < model.k(); ++j) {
    const double* table = &model.log_tables[j * DensityModel::kDims * DensityModel::kCategories];
    double sum = model.log_weights[j];
    for (int g = 0; g < DensityModel::kDims; ++g) sum += table[g * DensityModel::kCategories + x[g]];
    h[j] = sum;
  }
  return log_sum_exp(h);
}

// ---------------------------------------------------------------------------
// Serialisation

namespace {

constexpr char kMagic[4] = {'F', 'N', 'D', 'M'};

class Writer {
public:
  template <typename T>
  void put(T value) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                                 std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint8_t>>;
    const U bits = std::bit_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i)
      bytes_.push_back(static_cast<char>((bits >> (8 * i)) & 0xffu));
  }
  void raw(const char* data, std::size_t n) { bytes_.insert(bytes_.end(), data, data + n); }
  const std::vector<char>& bytes() const { return bytes_; }

private:
  std::vector<char> bytes_;
};

class Reader {
public:
  explicit Reader(std::vector<char> bytes) : bytes_(std::move(bytes)) {}

  template <typename T>
  T get() {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                                 std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint8_t>>;
    need(sizeof(T));
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
      bits |= static_cast<U>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += sizeof(T);
    return std::bit_cast<T>(bits);
  }
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n)
      throw FormatError(FormatError::Kind::Truncated, "model file is truncated");
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  const char* cursor() const { return bytes_.data() + pos_; }
  void skip(std::size_t n) {
    need(n);
    pos_ += n;
  }

private:
  std::vector<char> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_model(const DensityModel& model, const std::filesystem::path& path) {
  Writer w;
  w.raw(kMagic, sizeof kMagic);
  w.put<std::uint32_t>(model.meta.version);
  w.put<std::uint64_t>(model.k());
  w.put<std::uint32_t>(DensityModel::kDims);
  w.put<std::uint32_t>(DensityModel::kCategories);
  w.put<std::int64_t>(model.meta.n);
  w.put<std::int64_t>(model.meta.created);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(model.orb.n_levels));
  w.put<double>(model.orb.scale_factor);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(model.orb.patch_radius));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(model.orb.fast_threshold));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(model.pattern.pairs().size()));
  for (const orb::PointPair& p : model.pattern.pairs()) {
    w.put<std::int8_t>(p.x1);
    w.put<std::int8_t>(p.y1);
    w.put<std::int8_t>(p.x2);
    w.put<std::int8_t>(p.y2);
  }
  for (double v : model.log_weights) w.put<double>(v);
  for (double v : model.log_tables) w.put<double>(v);
  for (const cluster::Centroid& c : model.centroids)
    for (double v : c) w.put<double>(v);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(FormatError::Kind::Io, "cannot write model file " + path.string());
  out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
  if (!out) throw FormatError(FormatError::Kind::Io, "cannot write model file " + path.string());
}

DensityModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(FormatError::Kind::Io, "cannot open model file " + path.string());
  Reader r(std::vector<char>(std::istreambuf_iterator<char>(in), {}));

  r.need(sizeof kMagic);
  if (std::memcmp(r.cursor(), kMagic, sizeof kMagic) != 0)
    throw FormatError(FormatError::Kind::BadMagic, "not a model file (bad magic)");
  r.skip(sizeof kMagic);

  DensityModel model;
  model.meta.version = r.get<std::uint32_t>();
  if (model.meta.version != kModelVersion)
    throw FormatError(FormatError::Kind::VersionMismatch,
                      "unsupported model version " + std::to_string(model.meta.version));
  const auto k = r.get<std::uint64_t>();
  const auto dims = r.get<std::uint32_t>();
  const auto cats = r.get<std::uint32_t>();
  if (dims != DensityModel::kDims || cats != DensityModel::kCategories)
    throw FormatError(FormatError::Kind::Invalid, "model has unexpected table shape");
  model.meta.n = r.get<std::int64_t>();
  model.meta.created = r.get<std::int64_t>();
  model.orb.n_levels = static_cast<int>(r.get<std::uint32_t>());
  model.orb.scale_factor = r.get<double>();
  model.orb.patch_radius = static_cast<int>(r.get<std::uint32_t>());
  model.orb.fast_threshold = static_cast<int>(r.get<std::uint32_t>());

  const auto pair_count = r.get<std::uint32_t>();
  if (pair_count != Descriptor256::kBits)
    throw FormatError(FormatError::Kind::Invalid, "model pattern does not have 256 pairs");
  orb::BriefPattern::Pairs pairs{};
  for (orb::PointPair& p : pairs) {
    p.x1 = r.get<std::int8_t>();
    p.y1 = r.get<std::int8_t>();
    p.x2 = r.get<std::int8_t>();
    p.y2 = r.get<std::int8_t>();
  }
  try {
    model.pattern = orb::BriefPattern(pairs, model.orb.patch_radius);
  } catch (const ArgumentError& e) {
    throw FormatError(FormatError::Kind::Invalid, std::string("invalid BRIEF pattern: ") + e.what());
  }

  const std::size_t per_cluster = 1 + DensityModel::kDims * DensityModel::kCategories +
                                  DensityModel::kDims;
  if (k == 0 || k > r.remaining() / (per_cluster * sizeof(double)))
    throw FormatError(k == 0 ? FormatError::Kind::Invalid : FormatError::Kind::Truncated,
                      k == 0 ? "model has no clusters" : "model file is truncated");
  model.log_weights.resize(k);
  for (double& v : model.log_weights) v = r.get<double>();
  model.log_tables.resize(k * DensityModel::kDims * DensityModel::kCategories);
  for (double& v : model.log_tables) v = r.get<double>();
  model.centroids.resize(k);
  for (cluster::Centroid& c : model.centroids)
    for (double& v : c) v = r.get<double>();
  if (r.remaining() != 0)
    throw FormatError(FormatError::Kind::Invalid, "trailing bytes after model data");
  return model;
}

void write_weights_csv(const std::filesystem::path& path, const DensityModel& model) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "cluster,weight\n";
  char line[64];
  for (std::size_t j = 0; j < model.k(); ++j) {
    std::snprintf(line, sizeof line, "%zu,%.17g\n", j, std::exp(model.log_weights[j]));
    out << line;
  }
}

}  // namespace featurenull::density
