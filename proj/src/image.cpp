#include "featurenull/image.hpp"

#include <algorithm>
#include <cmath>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "featurenull/error.hpp"

namespace featurenull {

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width < 0 || height < 0 ||
      pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw ArgumentError("pixel buffer does not match image dimensions");
}

std::uint8_t luma(double r, double g, double b) noexcept {
  const double y = 0.299 * r + 0.587 * g + 0.114 * b;
  const double rounded = std::floor(y + 0.5);
  return static_cast<std::uint8_t>(std::clamp(rounded, 0.0, 255.0));
}

namespace {

double sample_value(const cv::Mat& m, int x, int y, int c) {
  if (m.depth() == CV_16U) return m.ptr<std::uint16_t>(y)[x * m.channels() + c] / 257.0;
  return m.ptr<std::uint8_t>(y)[x * m.channels() + c];
}

double over_white(double value, double alpha) {
  return value * alpha + 255.0 * (1.0 - alpha);
}

}  // namespace

GrayImage load_grayscale(const std::filesystem::path& path) {
  cv::Mat m;
  try {
    m = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  } catch (const cv::Exception&) {
    throw DecodeError(path);
  }
  if (m.empty() || m.dims != 2) throw DecodeError(path);
  if (m.depth() != CV_8U && m.depth() != CV_16U) throw DecodeError(path);

  const int channels = m.channels();
  GrayImage out(m.cols, m.rows);
  for (int y = 0; y < m.rows; ++y) {
    for (int x = 0; x < m.cols; ++x) {
      std::uint8_t v = 0;
      switch (channels) {
        case 1:
          v = m.depth() == CV_8U ? m.ptr<std::uint8_t>(y)[x]
                                 : luma(sample_value(m, x, y, 0), sample_value(m, x, y, 0),
                                        sample_value(m, x, y, 0));
          break;
        case 2: {
          const double a = sample_value(m, x, y, 1) / 255.0;
          const double g = over_white(sample_value(m, x, y, 0), a);
          v = luma(g, g, g);
          break;
        }
        case 3:  // OpenCV decodes to BGR
          v = luma(sample_value(m, x, y, 2), sample_value(m, x, y, 1), sample_value(m, x, y, 0));
          break;
        case 4: {
          const double a = sample_value(m, x, y, 3) / 255.0;
          v = luma(over_white(sample_value(m, x, y, 2), a),
                   over_white(sample_value(m, x, y, 1), a),
                   over_white(sample_value(m, x, y, 0), a));
          break;
        }
        default:
          throw DecodeError(path);
      }
      out.at(x, y) = v;
    }
  }
  return out;
}

namespace {

const std::vector<int> kPngParams{cv::IMWRITE_PNG_COMPRESSION, 6};

void write_mat(const std::filesystem::path& path, const cv::Mat& m) {
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), m, kPngParams);
  } catch (const cv::Exception& e) {
    throw Error("cannot write " + path.string() + ": " + e.what());
  }
  if (!ok) throw Error("cannot write " + path.string());
}

}  // namespace

void write_png(const std::filesystem::path& path, const GrayImage& img) {
  cv::Mat m(img.height(), img.width(), CV_8UC1);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) m.at<std::uint8_t>(y, x) = img.at(x, y);
  write_mat(path, m);
}

void write_png(const std::filesystem::path& path, const RgbImage& img) {
  cv::Mat m(img.height, img.width, CV_8UC3);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const Rgb& p = img.at(x, y);
      m.at<cv::Vec3b>(y, x) = cv::Vec3b(p.b, p.g, p.r);
    }
  }
  write_mat(path, m);
}

}  // namespace featurenull
