#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "featurenull/descriptor.hpp"
#include "featurenull/orb.hpp"

namespace featurenull::corpus {

struct ManifestEntry {
  std::string path;
  int width = 0;
  int height = 0;
  int keypoint_count = 0;
  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct CorpusManifest {
  std::vector<ManifestEntry> entries;
  std::int64_t total_images = 0;
  friend bool operator==(const CorpusManifest&, const CorpusManifest&) = default;
};

struct FeatureRecord {
  std::uint32_t image_index = 0;
  ReducedVec reduced;
  friend bool operator==(const FeatureRecord&, const FeatureRecord&) = default;
};

struct FeatureStore {
  std::vector<FeatureRecord> records;

  std::size_t count() const noexcept { return records.size(); }
  friend bool operator==(const FeatureStore&, const FeatureStore&) = default;
};

struct ScanOptions {
  int max_keypoints = 500;
  orb::OrbParams orb;
  unsigned threads = 1;
};

struct ScanResult {
  CorpusManifest manifest;
  FeatureStore features;  // reduced descriptors of every manifest entry
  std::vector<std::string> skipped;  // files that failed to decode
};

/// Every regular file under `root`, recursively, in lexicographic order of
/// its generic path string.
std::vector<std::filesystem::path> list_files(const std::filesystem::path& root);

/// Decodes every file under `root`, extracts up to max_keypoints ORB features
/// per image and reduces them. Undecodable files are skipped with a warning on
/// std::clog. Output is independent of options.threads.
/// Throws DataError if root is missing or not a directory.
ScanResult extract_corpus(const std::filesystem::path& root, const orb::BriefPattern& pattern,
                          const ScanOptions& options);

/// Manifest-only form of extract_corpus.
CorpusManifest scan_corpus(const std::filesystem::path& root, int max_keypoints = 500);
ScanResult scan_corpus(const std::filesystem::path& root, const ScanOptions& options);

/// Selection sampling without replacement: keeps exactly
/// round(fraction * count) records in their original order.
/// Throws ArgumentError unless fraction is in (0, 1].
FeatureStore sample_features(const FeatureStore& store, double fraction, std::uint64_t seed);

/// JSON Lines, one entry per line with fields path/width/height/keypoint_count.
void write_manifest(const std::filesystem::path& path, const CorpusManifest& manifest);
CorpusManifest read_manifest(const std::filesystem::path& path);

/// Little-endian: "FNFS", u32 version = 1, u64 count, then per record
/// u32 image_index followed by 16 component bytes.
void write_feature_store(const std::filesystem::path& path, const FeatureStore& store);
FeatureStore read_feature_store(const std::filesystem::path& path);

inline constexpr std::uint32_t kFeatureStoreVersion = 1;

}  // namespace featurenull::corpus
