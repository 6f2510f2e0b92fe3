#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "featurenull/image.hpp"

namespace fixtures {

using featurenull::GrayImage;

/// Scratch directory removed on destruction.
class TempDir {
public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
  std::filesystem::path path_;
};

GrayImage constant(int w, int h, std::uint8_t value);
GrayImage checkerboard(int w, int h, int cell);
GrayImage square_on_black(int w, int h, int x0, int y0, int side, std::uint8_t value = 255);
GrayImage horizontal_gradient(int w, int h);
GrayImage negative(const GrayImage& img);
GrayImage random_image(int w, int h, std::uint64_t seed);

/// Maps the pixel at offset (u, v) from (cx, cy) to (cx - v, cy + u); a
/// 90-degree turn about the centre that is exact on the pixel grid.
GrayImage rotate90_about(const GrayImage& img, int cx, int cy);

/// Blurred noise posterised to a few random grey levels.
GrayImage noise_texture(int w, int h, std::uint64_t seed);
/// Western-blot-like image: dark horizontal bands in lanes on a light field.
GrayImage blob_image(int w, int h, std::uint64_t seed);
/// Lines of lowercase words on a lightly noisy white page.
GrayImage text_image(int w, int h, std::uint64_t seed);

}  // namespace fixtures
