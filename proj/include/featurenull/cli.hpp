#pragma once

#include <cstdint>
#include <iosfwd>

namespace featurenull::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kDataError = 3,
  kCorruptModel = 4,
};

struct RunConfig {
  int clusters = 2000;
  double sample_fraction = 1.0;
  std::uint64_t seed = 20190601;
  int max_keypoints = 500;
  int stride = 3;
  int pyramid_levels = 8;
  double scale_factor = 1.2;
  int fast_threshold = 20;
};

/// Entry point for the `featurenull` binary. Writes human-readable output to
/// `out` and diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace featurenull::cli
