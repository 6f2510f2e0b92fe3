#include "featurenull/orb.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <tuple>

#include "featurenull/error.hpp"
#include "featurenull/parallel.hpp"

namespace featurenull::orb {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool in_disc(int x, int y, int radius) noexcept { return x * x + y * y <= radius * radius; }

std::uint8_t clamped(const GrayImage& img, int x, int y) noexcept {
  return img.at(std::clamp(x, 0, img.width() - 1), std::clamp(y, 0, img.height() - 1));
}

std::uint8_t round_to_byte(double v) noexcept {
  return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

GrayImage resample(const GrayImage& src, int width, int height, double scale) {
  GrayImage out(width, height);
  for (int y = 0; y < height; ++y) {
    const double sy = (y + 0.5) * scale - 0.5;
    const int y0 = static_cast<int>(std::floor(sy));
    const double fy = sy - y0;
    for (int x = 0; x < width; ++x) {
      const double sx = (x + 0.5) * scale - 0.5;
      const int x0 = static_cast<int>(std::floor(sx));
      const double fx = sx - x0;
      const double top = (1.0 - fx) * clamped(src, x0, y0) + fx * clamped(src, x0 + 1, y0);
      const double bottom =
          (1.0 - fx) * clamped(src, x0, y0 + 1) + fx * clamped(src, x0 + 1, y0 + 1);
      out.at(x, y) = round_to_byte((1.0 - fy) * top + fy * bottom);
    }
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// BRIEF pattern

BriefPattern::BriefPattern(const Pairs& pairs, int patch_radius)
    : pairs_(pairs), patch_radius_(patch_radius) {
  if (patch_radius < 1 || patch_radius > 127) throw ArgumentError("patch radius out of range");
  for (const PointPair& p : pairs_) {
    if (!in_disc(p.x1, p.y1, patch_radius) || !in_disc(p.x2, p.y2, patch_radius))
      throw ArgumentError("BRIEF pair offset outside the patch disc");
  }
  for (int t = 0; t < kTemplateCount; ++t) {
    const double theta = kTwoPi * t / kTemplateCount;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    auto rotate = [&](int x, int y, std::int8_t& ox, std::int8_t& oy) {
      const long rx = t == 0 ? x : std::lround(c * x - s * y);
      const long ry = t == 0 ? y : std::lround(s * x + c * y);
      if (!in_disc(static_cast<int>(rx), static_cast<int>(ry), patch_radius))
        throw ArgumentError("rotated BRIEF offset leaves the patch disc");
      ox = static_cast<std::int8_t>(rx);
      oy = static_cast<std::int8_t>(ry);
    };
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
      PointPair& out = templates_[t][i];
      rotate(pairs_[i].x1, pairs_[i].y1, out.x1, out.y1);
      rotate(pairs_[i].x2, pairs_[i].y2, out.x2, out.y2);
    }
  }
}

BriefPattern BriefPattern::generate(int patch_radius, std::uint64_t seed) {
  if (patch_radius < 2 || patch_radius > 127) throw ArgumentError("patch radius out of range");
  Rng rng(seed);
  const double sigma = (2.0 * patch_radius + 1.0) / 5.0;
  const int limit = patch_radius - 1;
  auto draw = [&] { return static_cast<int>(std::lround(sigma * standard_normal(rng))); };

  Pairs pairs{};
  for (PointPair& p : pairs) {
    for (;;) {
      const int x1 = draw(), y1 = draw(), x2 = draw(), y2 = draw();
      if (!in_disc(x1, y1, limit) || !in_disc(x2, y2, limit)) continue;
      if (x1 == x2 && y1 == y2) continue;
      p = {static_cast<std::int8_t>(x1), static_cast<std::int8_t>(y1),
           static_cast<std::int8_t>(x2), static_cast<std::int8_t>(y2)};
      break;
    }
  }
  return BriefPattern(pairs, patch_radius);
}

int BriefPattern::template_index(double angle) noexcept {
  const long bin = std::lround(angle / (kTwoPi / kTemplateCount));
  return static_cast<int>(((bin % kTemplateCount) + kTemplateCount) % kTemplateCount);
}

// ---------------------------------------------------------------------------
// Pyramid

double Pyramid::scale(int level) const { return std::pow(scale_factor, level); }

GrayImage box_smooth(const GrayImage& img) {
  constexpr int half = kSmoothingBox / 2;
  constexpr int area = kSmoothingBox * kSmoothingBox;
  GrayImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      int sum = 0;
      for (int dy = -half; dy <= half; ++dy)
        for (int dx = -half; dx <= half; ++dx) sum += clamped(img, x + dx, y + dy);
      out.at(x, y) = static_cast<std::uint8_t>((sum + area / 2) / area);
    }
  }
  return out;
}

Pyramid build_pyramid(const GrayImage& img, int n_levels, double scale_factor, int patch_radius) {
  if (n_levels < 1) throw ArgumentError("pyramid needs at least one level");
  if (!(scale_factor > 1.0)) throw ArgumentError("pyramid scale factor must exceed 1");
  const int patch = 2 * patch_radius + 1;
  if (img.width() < patch || img.height() < patch) {
    char msg[128];
    std::snprintf(msg, sizeof msg, "image %dx%d is smaller than the %dx%d patch", img.width(),
                  img.height(), patch, patch);
    throw ImageTooSmallError(msg);
  }

  Pyramid pyramid;
  pyramid.scale_factor = scale_factor;
  pyramid.levels.push_back(img);
  for (int level = 1; level < n_levels; ++level) {
    const double s = std::pow(scale_factor, level);
    const int w = static_cast<int>(std::floor(img.width() / s));
    const int h = static_cast<int>(std::floor(img.height() / s));
    if (w < patch || h < patch) break;
    pyramid.levels.push_back(resample(img, w, h, s));
  }
  for (const GrayImage& level : pyramid.levels) pyramid.smoothed.push_back(box_smooth(level));
  return pyramid;
}

// ---------------------------------------------------------------------------
// FAST

int fast_score(const GrayImage& img, int x, int y, int threshold) noexcept {
  const int center = img.at(x, y);
  std::array<int, 16> diff{};
  for (int k = 0; k < 16; ++k)
    diff[k] = img.at(x + kFastCircle[k].x, y + kFastCircle[k].y) - center;

  auto arc_score = [&](int sign) {
    // Longest circular run of pixels beyond the threshold on the given side.
    int run = 0, longest = 0, total = 0;
    for (int k = 0; k < 32; ++k) {
      const int d = sign * diff[k & 15];
      if (d > threshold) {
        longest = std::max(longest, ++run);
      } else {
        run = 0;
      }
    }
    if (std::min(longest, 16) < 9) return 0;
    for (int d : diff)
      if (sign * d > threshold) total += sign * d - threshold;
    return total;
  };
  return std::max(arc_score(+1), arc_score(-1));
}

std::vector<Point> detect_fast(const GrayImage& img, int threshold) {
  if (threshold < 1 || threshold > 255) throw ArgumentError("FAST threshold must be in [1, 255]");
  const int w = img.width(), h = img.height();
  std::vector<Point> corners;
  if (w < 7 || h < 7) return corners;

  std::vector<int> score(static_cast<std::size_t>(w) * h, 0);
  for (int y = 3; y < h - 3; ++y)
    for (int x = 3; x < w - 3; ++x) score[static_cast<std::size_t>(y) * w + x] = fast_score(img, x, y, threshold);

  auto at = [&](int x, int y) { return score[static_cast<std::size_t>(y) * w + x]; };
  for (int y = 3; y < h - 3; ++y) {
    for (int x = 3; x < w - 3; ++x) {
      const int s = at(x, y);
      if (s == 0) continue;
      const bool keep = s > at(x - 1, y - 1) && s > at(x, y - 1) && s > at(x + 1, y - 1) &&
                        s > at(x - 1, y) && s >= at(x + 1, y) && s >= at(x - 1, y + 1) &&
                        s >= at(x, y + 1) && s >= at(x + 1, y + 1);
      if (keep) corners.push_back({x, y});
    }
  }
  return corners;
}

// ---------------------------------------------------------------------------
// Harris, orientation, BRIEF

double harris_response(const GrayImage& img, int x, int y) {
  constexpr int half = kHarrisBlock / 2;
  if (x - half < 0 || y - half < 0 || x + half >= img.width() || y + half >= img.height())
    throw OutOfBoundsError("Harris block leaves the image");

  double a = 0.0, b = 0.0, c = 0.0;
  for (int v = y - half; v <= y + half; ++v) {
    for (int u = x - half; u <= x + half; ++u) {
      const int gx = (clamped(img, u + 1, v - 1) + 2 * clamped(img, u + 1, v) +
                      clamped(img, u + 1, v + 1)) -
                     (clamped(img, u - 1, v - 1) + 2 * clamped(img, u - 1, v) +
                      clamped(img, u - 1, v + 1));
      const int gy = (clamped(img, u - 1, v + 1) + 2 * clamped(img, u, v + 1) +
                      clamped(img, u + 1, v + 1)) -
                     (clamped(img, u - 1, v - 1) + 2 * clamped(img, u, v - 1) +
                      clamped(img, u + 1, v - 1));
      a += static_cast<double>(gx) * gx;
      b += static_cast<double>(gx) * gy;
      c += static_cast<double>(gy) * gy;
    }
  }
  const double det = a * c - b * b;
  const double trace = a + c;
  return det - kHarrisK * trace * trace;
}

bool patch_fits(const GrayImage& img, int x, int y, int radius) noexcept {
  return x - radius >= 0 && y - radius >= 0 && x + radius < img.width() &&
         y + radius < img.height();
}

double orientation(const GrayImage& img, int x, int y, int radius) {
  if (!patch_fits(img, x, y, radius)) throw OutOfBoundsError("orientation disc leaves the image");
  std::int64_t m10 = 0, m01 = 0;
  for (int v = -radius; v <= radius; ++v) {
    for (int u = -radius; u <= radius; ++u) {
      if (!in_disc(u, v, radius)) continue;
      const int intensity = img.at(x + u, y + v);
      m10 += static_cast<std::int64_t>(u) * intensity;
      m01 += static_cast<std::int64_t>(v) * intensity;
    }
  }
  if (m10 == 0 && m01 == 0) return 0.0;
  double theta = std::atan2(static_cast<double>(m01), static_cast<double>(m10));
  if (theta < 0.0) theta += kTwoPi;
  if (theta >= kTwoPi) theta -= kTwoPi;
  return theta;
}

Descriptor256 brief_descriptor(const GrayImage& smoothed, int x, int y, double angle,
                               const BriefPattern& pattern) {
  if (!patch_fits(smoothed, x, y, pattern.patch_radius()))
    throw OutOfBoundsError("BRIEF patch leaves the image");
  const auto& tests = pattern.rotated(BriefPattern::template_index(angle));
  Descriptor256 d;
  for (int i = 0; i < Descriptor256::kBits; ++i) {
    const PointPair& p = tests[i];
    if (smoothed.at(x + p.x1, y + p.y1) < smoothed.at(x + p.x2, y + p.y2)) d.set(i);
  }
  return d;
}

Descriptor256 brief_descriptor(const Pyramid& pyramid, const Keypoint& kp,
                               const BriefPattern& pattern) {
  if (kp.level < 0 || kp.level >= pyramid.n_levels())
    throw OutOfBoundsError("keypoint level outside the pyramid");
  const double s = pyramid.scale(kp.level);
  return brief_descriptor(pyramid.smoothed[kp.level], static_cast<int>(std::lround(kp.x / s)),
                          static_cast<int>(std::lround(kp.y / s)), kp.angle, pattern);
}

// ---------------------------------------------------------------------------
// Keypoint extraction

std::vector<Feature> top_keypoints(const Pyramid& pyramid, int n, const BriefPattern& pattern,
                                   const OrbParams& params) {
  if (n < 1) throw ArgumentError("keypoint budget must be at least 1");
  struct Candidate {
    double response;
    int level, y, x;
  };
  const int radius = pattern.patch_radius();
  std::vector<Candidate> candidates;
  for (int level = 0; level < pyramid.n_levels(); ++level) {
    const GrayImage& img = pyramid.levels[level];
    for (const Point& p : detect_fast(img, params.fast_threshold)) {
      if (!patch_fits(img, p.x, p.y, radius)) continue;
      candidates.push_back({harris_response(img, p.x, p.y), level, p.y, p.x});
    }
  }
  auto order = [](const Candidate& a, const Candidate& b) {
    if (a.response != b.response) return a.response > b.response;
    return std::tie(a.level, a.y, a.x) < std::tie(b.level, b.y, b.x);
  };
  const std::size_t keep = std::min<std::size_t>(candidates.size(), static_cast<std::size_t>(n));
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                    candidates.end(), order);
  candidates.resize(keep);

  std::vector<Feature> features;
  features.reserve(keep);
  for (const Candidate& c : candidates) {
    const double s = pyramid.scale(c.level);
    Keypoint kp;
    kp.x = c.x * s;
    kp.y = c.y * s;
    kp.level = c.level;
    kp.response = c.response;
    kp.angle = orientation(pyramid.levels[c.level], c.x, c.y, radius);
    features.push_back(
        {kp, brief_descriptor(pyramid.smoothed[c.level], c.x, c.y, kp.angle, pattern)});
  }
  return features;
}

std::vector<Feature> top_keypoints(const GrayImage& img, int n, const BriefPattern& pattern,
                                   const OrbParams& params) {
  if (n < 1) throw ArgumentError("keypoint budget must be at least 1");
  const int patch = 2 * pattern.patch_radius() + 1;
  if (img.width() < patch || img.height() < patch) return {};
  return top_keypoints(
      build_pyramid(img, params.n_levels, params.scale_factor, pattern.patch_radius()), n,
      pattern, params);
}

PointDescriptor descriptor_at_point(const Pyramid& pyramid, double x, double y,
                                    const BriefPattern& pattern) {
  const int radius = pattern.patch_radius();
  int best_level = -1, best_x = 0, best_y = 0;
  double best_response = 0.0;
  for (int level = 0; level < pyramid.n_levels(); ++level) {
    const double s = pyramid.scale(level);
    const int lx = static_cast<int>(std::lround(x / s));
    const int ly = static_cast<int>(std::lround(y / s));
    const GrayImage& img = pyramid.levels[level];
    if (!patch_fits(img, lx, ly, radius)) continue;
    const double response = harris_response(img, lx, ly);
    if (best_level < 0 || response > best_response) {
      best_level = level;
      best_response = response;
      best_x = lx;
      best_y = ly;
    }
  }
  if (best_level < 0) throw OutOfBoundsError("no pyramid level admits a patch at this point");

  PointDescriptor out;
  out.level = best_level;
  out.response = best_response;
  out.angle = orientation(pyramid.levels[best_level], best_x, best_y, radius);
  out.descriptor =
      brief_descriptor(pyramid.smoothed[best_level], best_x, best_y, out.angle, pattern);
  return out;
}

PointDescriptor descriptor_at_point(const GrayImage& img, double x, double y,
                                    const BriefPattern& pattern, const OrbParams& params) {
  return descriptor_at_point(
      build_pyramid(img, params.n_levels, params.scale_factor, pattern.patch_radius()), x, y,
      pattern);
}

}  // namespace featurenull::orb
