#include "featurenull/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>

#include <json.hpp>

#include "featurenull/error.hpp"
#include "featurenull/image.hpp"
#include "featurenull/parallel.hpp"
#include "featurenull/reduce.hpp"

namespace featurenull::corpus {

namespace fs = std::filesystem;

std::vector<fs::path> list_files(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec))
    throw DataError("corpus root is not a readable directory: " + root.string());
  std::vector<fs::path> files;
  for (auto it = fs::recursive_directory_iterator(root, ec); !ec && it != fs::end(it);
       it.increment(ec)) {
    if (it->is_regular_file(ec)) files.push_back(it->path());
  }
  if (ec) throw DataError("cannot walk corpus root " + root.string() + ": " + ec.message());
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    return a.generic_string() < b.generic_string();
  });
  return files;
}

namespace {

struct ImageResult {
  int width = 0;
  int height = 0;
  std::vector<ReducedVec> reduced;
};

}  // namespace

ScanResult extract_corpus(const fs::path& root, const orb::BriefPattern& pattern,
                          const ScanOptions& options) {
  if (options.max_keypoints < 1) throw ArgumentError("max_keypoints must be at least 1");
  const std::vector<fs::path> files = list_files(root);
  std::vector<std::optional<ImageResult>> results(files.size());

  parallel_for(files.size(), options.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      GrayImage img;
      try {
        img = load_grayscale(files[i]);
      } catch (const DecodeError&) {
        continue;
      }
      ImageResult r;
      r.width = img.width();
      r.height = img.height();
      for (const orb::Feature& f : orb::top_keypoints(img, options.max_keypoints, pattern, options.orb))
        r.reduced.push_back(reduce::reduce_descriptor(f.descriptor));
      results[i] = std::move(r);
    }
  });

  ScanResult out;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (!results[i]) {
      std::clog << "warning: skipping undecodable file " << files[i].generic_string() << '\n';
      out.skipped.push_back(files[i].generic_string());
      continue;
    }
    const auto image_index = static_cast<std::uint32_t>(out.manifest.entries.size());
    out.manifest.entries.push_back({files[i].generic_string(), results[i]->width,
                                    results[i]->height,
                                    static_cast<int>(results[i]->reduced.size())});
    for (const ReducedVec& v : results[i]->reduced) out.features.records.push_back({image_index, v});
  }
  out.manifest.total_images = static_cast<std::int64_t>(out.manifest.entries.size());
  return out;
}

ScanResult scan_corpus(const fs::path& root, const ScanOptions& options) {
  return extract_corpus(root, orb::BriefPattern::generate(options.orb.patch_radius), options);
}

CorpusManifest scan_corpus(const fs::path& root, int max_keypoints) {
  ScanOptions options;
  options.max_keypoints = max_keypoints;
  return scan_corpus(root, options).manifest;
}

FeatureStore sample_features(const FeatureStore& store, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw ArgumentError("sample fraction must be in (0, 1]");
  const std::size_t n = store.count();
  std::size_t wanted = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  wanted = std::min(wanted, n);

  // Selection sampling (Knuth's Algorithm S): record i is kept with probability
  // remaining_wanted / remaining_records, which yields exactly `wanted` records.
  Rng rng(seed);
  FeatureStore out;
  out.records.reserve(wanted);
  for (std::size_t i = 0; i < n && out.records.size() < wanted; ++i) {
    const double left = static_cast<double>(n - i);
    if (uniform_unit(rng) * left < static_cast<double>(wanted - out.records.size()))
      out.records.push_back(store.records[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Persistence

void write_manifest(const fs::path& path, const CorpusManifest& manifest) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  for (const ManifestEntry& e : manifest.entries) {
    nlohmann::ordered_json line;
    line["path"] = e.path;
    line["width"] = e.width;
    line["height"] = e.height;
    line["keypoint_count"] = e.keypoint_count;
    out << line.dump() << '\n';
  }
}

CorpusManifest read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  CorpusManifest manifest;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      manifest.entries.push_back({j.at("path").get<std::string>(), j.at("width").get<int>(),
                                  j.at("height").get<int>(), j.at("keypoint_count").get<int>()});
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(FormatError::Kind::Invalid, "bad manifest line: " + std::string(e.what()));
    }
  }
  manifest.total_images = static_cast<std::int64_t>(manifest.entries.size());
  return manifest;
}

namespace {

constexpr char kStoreMagic[4] = {'F', 'N', 'F', 'S'};

template <typename T>
void put_le(std::string& buf, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

template <typename T>
T get_le(const std::string& buf, std::size_t& pos) {
  if (buf.size() - pos < sizeof(T))
    throw FormatError(FormatError::Kind::Truncated, "feature store is truncated");
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i)
    v |= static_cast<T>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
  pos += sizeof(T);
  return v;
}

}  // namespace

void write_feature_store(const fs::path& path, const FeatureStore& store) {
  std::string buf(kStoreMagic, sizeof kStoreMagic);
  put_le<std::uint32_t>(buf, kFeatureStoreVersion);
  put_le<std::uint64_t>(buf, store.count());
  for (const FeatureRecord& r : store.records) {
    put_le<std::uint32_t>(buf, r.image_index);
    for (std::uint8_t c : r.reduced.components) buf.push_back(static_cast<char>(c));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !out.write(buf.data(), static_cast<std::streamsize>(buf.size())))
    throw Error("cannot write " + path.string());
}

FeatureStore read_feature_store(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(FormatError::Kind::Io, "cannot read " + path.string());
  const std::string buf(std::istreambuf_iterator<char>(in), {});
  if (buf.size() < sizeof kStoreMagic)
    throw FormatError(FormatError::Kind::Truncated, "feature store is truncated");
  if (std::memcmp(buf.data(), kStoreMagic, sizeof kStoreMagic) != 0)
    throw FormatError(FormatError::Kind::BadMagic, "not a feature store (bad magic)");
  std::size_t pos = sizeof kStoreMagic;
  const auto version = get_le<std::uint32_t>(buf, pos);
  if (version != kFeatureStoreVersion)
    throw FormatError(FormatError::Kind::VersionMismatch,
                      "unsupported feature store version " + std::to_string(version));
  const auto count = get_le<std::uint64_t>(buf, pos);
  constexpr std::size_t record_size = 4 + ReducedVec::kDims;
  if (count > (buf.size() - pos) / record_size)
    throw FormatError(FormatError::Kind::Truncated, "feature store is truncated");
  FeatureStore store;
  store.records.resize(count);
  for (FeatureRecord& r : store.records) {
    r.image_index = get_le<std::uint32_t>(buf, pos);
    for (std::uint8_t& c : r.reduced.components) {
      c = static_cast<std::uint8_t>(buf[pos++]);
      if (c > 16) throw FormatError(FormatError::Kind::Invalid, "reduced component above 16");
    }
  }
  if (pos != buf.size())
    throw FormatError(FormatError::Kind::Invalid, "trailing bytes after feature records");
  return store;
}

}  // namespace featurenull::corpus
