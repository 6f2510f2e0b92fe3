#include "featurenull/probmap.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "featurenull/error.hpp"
#include "featurenull/parallel.hpp"
#include "featurenull/reduce.hpp"

namespace featurenull::probmap {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint8_t to_byte(double v) noexcept {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

}  // namespace

ProbabilityMap score_grid(const density::DensityModel& model, const GrayImage& img,
                          const ScoreOptions& options) {
  if (options.stride < 1) throw ArgumentError("stride must be at least 1");
  const std::size_t pixels = static_cast<std::size_t>(img.width()) * img.height();
  if (!options.mask.empty() && options.mask.size() != pixels)
    throw ArgumentError("mask size does not match the image");

  ProbabilityMap map;
  map.width = img.width();
  map.height = img.height();
  map.stride = options.stride;
  map.mask = options.mask;
  map.grid_width = img.width() == 0 ? 0 : (img.width() - 1) / options.stride + 1;
  map.grid_height = img.height() == 0 ? 0 : (img.height() - 1) / options.stride + 1;
  map.grid_values.assign(static_cast<std::size_t>(map.grid_width) * map.grid_height, kNaN);

  orb::Pyramid pyramid;
  try {
    pyramid = orb::build_pyramid(img, model.orb.n_levels, model.orb.scale_factor,
                                 model.pattern.patch_radius());
  } catch (const ImageTooSmallError& e) {
    throw DataError(std::string("no scorable point: ") + e.what());
  }

  parallel_for(static_cast<std::size_t>(map.grid_height), options.threads,
               [&](std::size_t begin, std::size_t end) {
                 for (std::size_t v = begin; v < end; ++v) {
                   const int y = static_cast<int>(v) * map.stride;
                   for (int u = 0; u < map.grid_width; ++u) {
                     const int x = u * map.stride;
                     if (!map.relevant(x, y)) continue;
                     try {
                       const orb::PointDescriptor pd =
                           orb::descriptor_at_point(pyramid, x, y, model.pattern);
                       map.grid_values[v * map.grid_width + u] =
                           density::log_prob(model, reduce::reduce_descriptor(pd.descriptor));
                     } catch (const OutOfBoundsError&) {
                     }
                   }
                 }
               });

  if (std::none_of(map.grid_values.begin(), map.grid_values.end(),
                   [](double v) { return std::isfinite(v); }))
    throw DataError("no grid point of the image could be scored");
  return map;
}

ProbabilityMap interpolate(ProbabilityMap map) {
  const int stride = map.stride;
  map.dense_values.assign(static_cast<std::size_t>(map.width) * map.height, kNaN);
  for (int y = 0; y < map.height; ++y) {
    int v0 = y / stride;
    double fy = static_cast<double>(y % stride) / stride;
    if (v0 >= map.grid_height - 1) {
      v0 = map.grid_height - 1;
      fy = 0.0;
    }
    const int v1 = std::min(v0 + 1, map.grid_height - 1);
    for (int x = 0; x < map.width; ++x) {
      if (!map.relevant(x, y)) continue;
      int u0 = x / stride;
      double fx = static_cast<double>(x % stride) / stride;
      if (u0 >= map.grid_width - 1) {
        u0 = map.grid_width - 1;
        fx = 0.0;
      }
      double& out = map.dense_values[static_cast<std::size_t>(y) * map.width + x];
      if (fx == 0.0 && fy == 0.0) {
        out = map.grid(u0, v0);
        continue;
      }
      const int u1 = std::min(u0 + 1, map.grid_width - 1);
      const double samples[4] = {map.grid(u0, v0), map.grid(u1, v0), map.grid(u0, v1),
                                 map.grid(u1, v1)};
      const double weights[4] = {(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy, fx * fy};
      // Offsets from the first usable sample keep constant neighbourhoods exact.
      double base = kNaN, sum = 0.0, total = 0.0;
      for (int k = 0; k < 4; ++k) {
        if (std::isnan(samples[k]) || weights[k] == 0.0) continue;
        if (std::isnan(base)) base = samples[k];
        sum += weights[k] * (samples[k] - base);
        total += weights[k];
      }
      if (total > 0.0) out = base + sum / total;
    }
  }
  return map;
}

double mean_log_prob(const ProbabilityMap& map) {
  double sum = 0.0;
  std::size_t n = 0;
  for (double v : map.grid_values) {
    if (!std::isfinite(v)) continue;
    sum += v;
    ++n;
  }
  if (n == 0) throw DataError("probability map has no finite samples");
  return sum / static_cast<double>(n);
}

double percentile(const ProbabilityMap& map, double pct) {
  const std::vector<double>& source = map.dense_values.empty() ? map.grid_values : map.dense_values;
  std::vector<double> finite;
  for (double v : source)
    if (std::isfinite(v)) finite.push_back(v);
  if (finite.empty()) throw DataError("probability map has no finite values");
  std::sort(finite.begin(), finite.end());
  const double rank = std::clamp(pct, 0.0, 100.0) / 100.0 * static_cast<double>(finite.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, finite.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return finite[lo] + frac * (finite[hi] - finite[lo]);
}

std::pair<double, double> default_range(const ProbabilityMap& map) {
  const double lo = percentile(map, 5.0);
  const double hi = percentile(map, 95.0);
  if (lo < hi) return {lo, hi};
  return {lo - 1.0, lo + 1.0};
}

Rgb colormap(double value, double lo, double hi) noexcept {
  const double t = std::clamp((value - lo) / (hi - lo), 0.0, 1.0);
  if (t <= 0.5) {
    const std::uint8_t c = to_byte(255.0 * (t / 0.5));
    return {c, c, 255};
  }
  const std::uint8_t c = to_byte(255.0 * (1.0 - (t - 0.5) / 0.5));
  return {255, c, c};
}

RgbImage render_heatmap(const ProbabilityMap& map, double lo, double hi, const GrayImage* overlay) {
  if (!(lo < hi)) throw ArgumentError("heatmap range needs lo < hi");
  if (overlay && (overlay->width() != map.width || overlay->height() != map.height))
    throw ArgumentError("overlay image size does not match the map");
  constexpr double kOpacity = 0.6;
  RgbImage out(map.width, map.height);
  const bool dense = !map.dense_values.empty();
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      double v = kNaN;
      if (dense) {
        v = map.dense(x, y);
      } else if (x % map.stride == 0 && y % map.stride == 0) {
        v = map.grid(x / map.stride, y / map.stride);
      }
      if (std::isnan(v) || !map.relevant(x, y)) continue;  // stays black
      Rgb c = colormap(v, lo, hi);
      if (overlay) {
        const double g = overlay->at(x, y);
        c = {to_byte(kOpacity * c.r + (1 - kOpacity) * g), to_byte(kOpacity * c.g + (1 - kOpacity) * g),
             to_byte(kOpacity * c.b + (1 - kOpacity) * g)};
      }
      out.at(x, y) = c;
    }
  }
  return out;
}

std::vector<std::uint8_t> auto_mask(const GrayImage& img, int min_region) {
  const int w = img.width(), h = img.height();
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(w) * h, 1);
  std::vector<std::uint8_t> seen(mask.size(), 0);
  std::vector<std::size_t> component, stack;
  for (std::size_t start = 0; start < mask.size(); ++start) {
    if (seen[start] || img.pixels()[start] != 0) continue;
    component.clear();
    stack.assign(1, start);
    seen[start] = 1;
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      component.push_back(p);
      const int px = static_cast<int>(p % w), py = static_cast<int>(p / w);
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = px + dx, ny = py + dy;
          if (!img.contains(nx, ny)) continue;
          const std::size_t q = static_cast<std::size_t>(ny) * w + nx;
          if (seen[q] || img.pixels()[q] != 0) continue;
          seen[q] = 1;
          stack.push_back(q);
        }
      }
    }
    if (static_cast<int>(component.size()) >= min_region)
      for (std::size_t p : component) mask[p] = 0;
  }
  return mask;
}

void write_grid_csv(const std::filesystem::path& path, const ProbabilityMap& map) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "x,y,ln_p\n";
  char line[96];
  for (int v = 0; v < map.grid_height; ++v) {
    for (int u = 0; u < map.grid_width; ++u) {
      const double value = map.grid(u, v);
      if (std::isnan(value))
        std::snprintf(line, sizeof line, "%d,%d,nan\n", u * map.stride, v * map.stride);
      else
        std::snprintf(line, sizeof line, "%d,%d,%.17g\n", u * map.stride, v * map.stride, value);
      out << line;
    }
  }
}

void write_grid_raw(const std::filesystem::path& path, const ProbabilityMap& map) {
  std::string buf;
  buf.reserve(map.grid_values.size() * 8);
  for (double v : map.grid_values) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !out.write(buf.data(), static_cast<std::streamsize>(buf.size())))
    throw Error("cannot write " + path.string());

  nlohmann::ordered_json header;
  header["width"] = map.width;
  header["height"] = map.height;
  header["stride"] = map.stride;
  header["grid_width"] = map.grid_width;
  header["grid_height"] = map.grid_height;
  header["dtype"] = "float64";
  header["byte_order"] = "little";
  header["layout"] = "row-major";
  std::ofstream sidecar(path.string() + ".json");
  if (!sidecar) throw Error("cannot write " + path.string() + ".json");
  sidecar << header.dump(2) << '\n';
}

}  // namespace featurenull::probmap
