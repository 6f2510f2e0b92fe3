#include "fixtures.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgproc.hpp>

#include "featurenull/parallel.hpp"

namespace fixtures {

namespace fs = std::filesystem;
using featurenull::Rng;
using featurenull::uniform_below;
using featurenull::uniform_unit;

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("featurenull_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

GrayImage constant(int w, int h, std::uint8_t value) { return GrayImage(w, h, value); }

GrayImage checkerboard(int w, int h, int cell) {
  GrayImage img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) img.at(x, y) = ((x / cell + y / cell) % 2) ? 255 : 0;
  return img;
}

GrayImage square_on_black(int w, int h, int x0, int y0, int side, std::uint8_t value) {
  GrayImage img(w, h);
  for (int y = y0; y < y0 + side; ++y)
    for (int x = x0; x < x0 + side; ++x) img.at(x, y) = value;
  return img;
}

GrayImage horizontal_gradient(int w, int h) {
  GrayImage img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) img.at(x, y) = static_cast<std::uint8_t>(x * 255 / std::max(1, w - 1));
  return img;
}

GrayImage negative(const GrayImage& img) {
  GrayImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) out.at(x, y) = static_cast<std::uint8_t>(255 - img.at(x, y));
  return out;
}

GrayImage random_image(int w, int h, std::uint64_t seed) {
  Rng rng(seed);
  GrayImage img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) img.at(x, y) = static_cast<std::uint8_t>(uniform_below(rng, 256));
  return img;
}

GrayImage rotate90_about(const GrayImage& img, int cx, int cy) {
  GrayImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      // out(cx - v, cy + u) = img(cx + u, cy + v)  =>  u = y - cy, v = cx - x
      const int sx = cx + (y - cy);
      const int sy = cy + (cx - x);
      out.at(x, y) = img.contains(sx, sy) ? img.at(sx, sy) : 0;
    }
  }
  return out;
}

namespace {

GrayImage from_float(const cv::Mat& m) {
  GrayImage img(m.cols, m.rows);
  for (int y = 0; y < m.rows; ++y)
    for (int x = 0; x < m.cols; ++x) img.at(x, y) = cv::saturate_cast<std::uint8_t>(m.at<float>(y, x));
  return img;
}

// Uniform noise in [-amplitude/2, amplitude/2).
cv::Mat noise_mat(int w, int h, Rng& rng, double amplitude) {
  cv::Mat m(h, w, CV_32F);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) m.at<float>(y, x) = static_cast<float>(amplitude * (uniform_unit(rng) - 0.5));
  return m;
}

}  // namespace

GrayImage noise_texture(int w, int h, std::uint64_t seed) {
  Rng rng(seed);
  cv::Mat m = noise_mat(w, h, rng, 1.0);
  const double sigma = 1.5 + 9.0 * uniform_unit(rng);
  cv::GaussianBlur(m, m, cv::Size(0, 0), sigma);
  cv::normalize(m, m, 0, 1, cv::NORM_MINMAX);
  const int levels = 2 + static_cast<int>(uniform_below(rng, 4));
  std::vector<double> tone(levels);
  for (auto& t : tone) t = 255.0 * uniform_unit(rng);
  cv::Mat out(h, w, CV_32F);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int k = std::min(levels - 1, static_cast<int>(m.at<float>(y, x) * levels));
      out.at<float>(y, x) = static_cast<float>(tone[k]);
    }
  }
  return from_float(out);
}

GrayImage blob_image(int w, int h, std::uint64_t seed) {
  Rng rng(seed);
  cv::Mat m(h, w, CV_32F, cv::Scalar(200.0 + 30.0 * uniform_unit(rng)));
  const int lanes = 3 + static_cast<int>(uniform_below(rng, 3));
  const double lane_w = static_cast<double>(w) / lanes;
  const int rows = 2 + static_cast<int>(uniform_below(rng, 3));
  for (int r = 0; r < rows; ++r) {
    const double cy = h * (r + 0.5 + 0.3 * (uniform_unit(rng) - 0.5)) / rows;
    const double sy = 2.0 + 3.0 * uniform_unit(rng);
    for (int lane = 0; lane < lanes; ++lane) {
      const double cx = lane_w * (lane + 0.5) + 3.0 * (uniform_unit(rng) - 0.5);
      const double sx = lane_w * (0.25 + 0.1 * uniform_unit(rng));
      const double depth = 60.0 + 140.0 * uniform_unit(rng);
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          const double dx = (x - cx) / sx, dy = (y - cy) / sy;
          m.at<float>(y, x) -= static_cast<float>(depth * std::exp(-0.5 * (dx * dx * dx * dx + dy * dy)));
        }
      }
    }
  }
  m += noise_mat(w, h, rng, 7.0);
  return from_float(m);
}

GrayImage text_image(int w, int h, std::uint64_t seed) {
  Rng rng(seed);
  static const std::string kAlphabet = "abcdefghijklmnopqrstuvwxyz";
  constexpr int kLineHeight = 16;
  cv::Mat page(h, w, CV_8U, cv::Scalar(255));
  for (int baseline = kLineHeight; baseline < h + kLineHeight; baseline += kLineHeight) {
    std::string line;
    while (line.size() < 40) {
      const int word = 2 + static_cast<int>(uniform_below(rng, 6));
      for (int c = 0; c < word; ++c) line.push_back(kAlphabet[uniform_below(rng, kAlphabet.size())]);
      line.push_back(' ');
    }
    cv::putText(page, line, cv::Point(2 - static_cast<int>(uniform_below(rng, 8)), baseline),
                cv::FONT_HERSHEY_SIMPLEX, 0.4, cv::Scalar(0), 1, cv::LINE_AA);
  }
  cv::Mat m;
  page.convertTo(m, CV_32F);
  m += noise_mat(w, h, rng, 12.0);
  return from_float(m);
}

}  // namespace fixtures
