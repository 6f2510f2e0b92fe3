#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "featurenull/density.hpp"
#include "featurenull/image.hpp"

namespace featurenull::probmap {

/// ln p sampled on a stride grid and (optionally) interpolated to every pixel.
/// NaN marks samples with no computable descriptor and masked pixels.
struct ProbabilityMap {
  int width = 0;
  int height = 0;
  int stride = 3;
  int grid_width = 0;   // samples at x = 0, stride, 2*stride, ... < width
  int grid_height = 0;
  std::vector<double> grid_values;
  std::vector<double> dense_values;  // empty until interpolate()
  std::vector<std::uint8_t> mask;    // empty, or width*height with 1 = relevant

  double grid(int u, int v) const { return grid_values[static_cast<std::size_t>(v) * grid_width + u]; }
  double dense(int x, int y) const { return dense_values[static_cast<std::size_t>(y) * width + x]; }
  bool relevant(int x, int y) const {
    return mask.empty() || mask[static_cast<std::size_t>(y) * width + x] != 0;
  }
};

struct ScoreOptions {
  int stride = 3;
  std::vector<std::uint8_t> mask;  // optional, width*height, 1 = relevant
  unsigned threads = 1;
};

/// Scores each grid point under the model. Throws ArgumentError for stride < 1
/// or a mask of the wrong size, DataError when no grid point is scorable.
ProbabilityMap score_grid(const density::DensityModel& model, const GrayImage& img,
                          const ScoreOptions& options = {});

/// Bilinear interpolation between the four surrounding grid samples; pixels
/// past the last sample clamp to it. NaN samples are dropped and the remaining
/// weights renormalised. Grid-aligned pixels copy their sample exactly.
ProbabilityMap interpolate(ProbabilityMap map);

/// Mean of the finite grid samples. Throws DataError if there are none.
double mean_log_prob(const ProbabilityMap& map);

/// Linear-interpolated percentile (0..100) of the finite dense values, or grid
/// values when no dense values exist.
double percentile(const ProbabilityMap& map, double pct);

/// Diverging blue -> white -> red over [lo, hi], clamped; NaN and masked
/// pixels are black. With `overlay`, colours are blended at 0.6 opacity over
/// the grayscale source. Throws ArgumentError when lo >= hi.
RgbImage render_heatmap(const ProbabilityMap& map, double lo, double hi,
                        const GrayImage* overlay = nullptr);

Rgb colormap(double value, double lo, double hi) noexcept;

/// Default colour range: [p5, p95] of the map, widened to [v - 1, v + 1] when
/// the map is constant.
std::pair<double, double> default_range(const ProbabilityMap& map);

/// 1 = relevant. Pixels of intensity 0 in an 8-connected component of at
/// least `min_region` pixels are masked out.
std::vector<std::uint8_t> auto_mask(const GrayImage& img, int min_region = 64);

/// "x,y,ln_p" per grid sample, pixel coordinates; NaN samples written as "nan".
void write_grid_csv(const std::filesystem::path& path, const ProbabilityMap& map);

/// Raw little-endian float64 grid (row-major, grid_height x grid_width) plus a
/// JSON sidecar at `path` + ".json".
void write_grid_raw(const std::filesystem::path& path, const ProbabilityMap& map);

}  // namespace featurenull::probmap
