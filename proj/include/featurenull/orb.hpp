#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "featurenull/descriptor.hpp"
#include "featurenull/image.hpp"

namespace featurenull::orb {

struct Point {
  int x = 0;
  int y = 0;
  friend bool operator==(const Point&, const Point&) = default;
  friend auto operator<=>(const Point&, const Point&) = default;
};

struct OrbParams {
  int n_levels = 8;
  double scale_factor = 1.2;
  int patch_radius = 15;
  int fast_threshold = 20;

  int patch_size() const noexcept { return 2 * patch_radius + 1; }
  friend bool operator==(const OrbParams&, const OrbParams&) = default;
};

inline constexpr double kHarrisK = 0.04;
inline constexpr int kHarrisBlock = 7;
inline constexpr int kSmoothingBox = 5;
inline constexpr int kTemplateCount = 30;
inline constexpr std::uint64_t kPatternSeed = 20190601;

struct Keypoint {
  double x = 0.0;  // level-0 coordinates
  double y = 0.0;
  double angle = 0.0;  // radians in [0, 2*pi), y axis pointing down
  double response = 0.0;  // Harris score at its level
  int level = 0;
};

struct PointPair {
  std::int8_t x1 = 0, y1 = 0, x2 = 0, y2 = 0;
  friend bool operator==(const PointPair&, const PointPair&) = default;
};

/// The 256 BRIEF test pairs plus their 30 precomputed rotations.
/// Template t is the pattern rotated by 2*pi*t/30.
class BriefPattern {
public:
  using Pairs = std::array<PointPair, Descriptor256::kBits>;

  BriefPattern() = default;

  /// Builds the rotated templates from `pairs`. Throws ArgumentError if any
  /// offset (or its rotation) falls outside the disc of `patch_radius`.
  BriefPattern(const Pairs& pairs, int patch_radius);

  /// Pairs drawn from an isotropic Gaussian with sigma^2 = patch_size^2 / 25,
  /// rejected until both points lie within radius patch_radius - 1 and differ.
  static BriefPattern generate(int patch_radius, std::uint64_t seed = kPatternSeed);

  const Pairs& pairs() const noexcept { return pairs_; }
  const Pairs& rotated(int t) const noexcept { return templates_[t]; }
  int patch_radius() const noexcept { return patch_radius_; }

  /// Nearest template to `angle`: round(angle / (2*pi/30)) mod 30.
  static int template_index(double angle) noexcept;

  friend bool operator==(const BriefPattern& a, const BriefPattern& b) {
    return a.patch_radius_ == b.patch_radius_ && a.pairs_ == b.pairs_;
  }

private:
  Pairs pairs_{};
  std::array<Pairs, kTemplateCount> templates_{};
  int patch_radius_ = 0;
};

struct Pyramid {
  std::vector<GrayImage> levels;
  std::vector<GrayImage> smoothed;  // 5x5 box-filtered copies, used by the BRIEF tests
  double scale_factor = 1.2;

  int n_levels() const noexcept { return static_cast<int>(levels.size()); }
  double scale(int level) const;
};

/// Level L is floor(dim0 / scale_factor^L) on each axis, bilinearly resampled
/// from level 0. Levels smaller than the patch are dropped.
/// Throws ImageTooSmallError when level 0 itself is smaller than the patch,
/// ArgumentError for n_levels < 1 or scale_factor <= 1.
Pyramid build_pyramid(const GrayImage& img, int n_levels, double scale_factor, int patch_radius);

/// 5x5 box mean with replicated borders, rounded to nearest.
GrayImage box_smooth(const GrayImage& img);

/// Bresenham circle of radius 3, clockwise from 12 o'clock.
inline constexpr std::array<Point, 16> kFastCircle{{
    {0, -3}, {1, -3}, {2, -2}, {3, -1}, {3, 0}, {3, 1}, {2, 2}, {1, 3},
    {0, 3}, {-1, 3}, {-2, 2}, {-3, 1}, {-3, 0}, {-3, -1}, {-2, -2}, {-1, -3}}};

/// FAST-9 corner score at (x, y): the larger of the summed excess brightness
/// (p - c - t over circle pixels brighter than c + t) and darkness, or 0 when
/// no arc of >= 9 contiguous circle pixels is uniformly brighter or darker.
/// (x, y) must be at least 3 pixels from every border.
int fast_score(const GrayImage& img, int x, int y, int threshold) noexcept;

/// All segment-test corners after 3x3 non-maximum suppression on the score.
/// A corner survives if its score is >= every neighbour's and strictly greater
/// than the neighbours that precede it in raster order. Output in raster order.
/// Throws ArgumentError for threshold outside [1, 255].
std::vector<Point> detect_fast(const GrayImage& img, int threshold);

/// det(M) - 0.04 * trace(M)^2 over the 7x7 block, M built from 3x3 Sobel
/// gradients (border pixels of the block read replicated neighbours).
/// Throws OutOfBoundsError if the block leaves the image.
double harris_response(const GrayImage& img, int x, int y);

/// Intensity-centroid angle atan2(m01, m10) in [0, 2*pi) over the disc of
/// `radius`. Returns 0 when both moments vanish.
/// Throws OutOfBoundsError if the disc leaves the image.
double orientation(const GrayImage& img, int x, int y, int radius);

/// Evaluates the steered tests centred at (x, y) on an already smoothed image.
/// Bit i = 1 iff I(z1) < I(z2) under the template nearest `angle`.
/// Throws OutOfBoundsError if the patch leaves the image.
Descriptor256 brief_descriptor(const GrayImage& smoothed, int x, int y, double angle,
                               const BriefPattern& pattern);

/// Descriptor for a keypoint, read from the smoothed copy of its level.
Descriptor256 brief_descriptor(const Pyramid& pyramid, const Keypoint& kp,
                               const BriefPattern& pattern);

/// True when a patch of `radius` centred at (x, y) fits inside `img`.
bool patch_fits(const GrayImage& img, int x, int y, int radius) noexcept;

struct Feature {
  Keypoint keypoint;
  Descriptor256 descriptor;
};

/// FAST on every level, Harris-ranked globally, top n kept, then oriented and
/// described. Sorted by descending response, ties by (level, y, x) in level
/// coordinates. Images too small for a single patch yield an empty list.
std::vector<Feature> top_keypoints(const GrayImage& img, int n, const BriefPattern& pattern,
                                   const OrbParams& params = {});

/// Same, on a pyramid built with `params`.
std::vector<Feature> top_keypoints(const Pyramid& pyramid, int n, const BriefPattern& pattern,
                                   const OrbParams& params);

struct PointDescriptor {
  Descriptor256 descriptor;
  int level = 0;
  double response = 0.0;
  double angle = 0.0;
};

/// Describes an arbitrary location: Harris is evaluated at the point scaled
/// into every level whose patch fits, the highest response wins (ties go to
/// the lower level), and orientation + steered BRIEF are computed there.
/// Throws OutOfBoundsError when no level admits the patch.
PointDescriptor descriptor_at_point(const Pyramid& pyramid, double x, double y,
                                    const BriefPattern& pattern);

PointDescriptor descriptor_at_point(const GrayImage& img, double x, double y,
                                    const BriefPattern& pattern, const OrbParams& params = {});

}  // namespace featurenull::orb
