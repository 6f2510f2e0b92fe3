#include <doctest.h>

#include <fstream>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "featurenull/error.hpp"
#include "featurenull/image.hpp"
#include "fixtures.hpp"

using namespace featurenull;

TEST_CASE("luma weights") {
  CHECK(luma(255, 0, 0) == 76);
  CHECK(luma(0, 255, 0) == 150);
  CHECK(luma(0, 0, 255) == 29);
  CHECK(luma(255, 255, 255) == 255);
  CHECK(luma(0, 0, 0) == 0);
  for (int v = 0; v < 256; ++v) CHECK(luma(v, v, v) == v);
}

TEST_CASE("gray buffer size is validated") {
  CHECK_THROWS_AS(GrayImage(4, 4, std::vector<std::uint8_t>(15)), ArgumentError);
  const GrayImage img(2, 2, std::vector<std::uint8_t>{1, 2, 3, 4});
  CHECK(img.at(1, 0) == 2);
  CHECK(img.at(0, 1) == 3);
}

TEST_CASE("png round trip is lossless") {
  fixtures::TempDir dir("image");
  const auto img = fixtures::random_image(37, 23, 9);
  write_png(dir / "a.png", img);
  const auto back = load_grayscale(dir / "a.png");
  CHECK(back == img);
  write_png(dir / "b.png", back);
  CHECK(load_grayscale(dir / "b.png") == img);
}

TEST_CASE("colour, alpha and 16-bit decoding") {
  fixtures::TempDir dir("image");
  cv::Mat bgr(1, 2, CV_8UC3);
  bgr.at<cv::Vec3b>(0, 0) = {0, 0, 255};
  bgr.at<cv::Vec3b>(0, 1) = {255, 255, 255};
  cv::imwrite((dir / "rgb.png").string(), bgr);
  auto g = load_grayscale(dir / "rgb.png");
  CHECK(g.at(0, 0) == 76);
  CHECK(g.at(1, 0) == 255);

  cv::Mat bgra(1, 2, CV_8UC4);
  bgra.at<cv::Vec4b>(0, 0) = {0, 0, 0, 0};
  bgra.at<cv::Vec4b>(0, 1) = {0, 0, 0, 255};
  cv::imwrite((dir / "rgba.png").string(), bgra);
  g = load_grayscale(dir / "rgba.png");
  CHECK(g.at(0, 0) == 255);
  CHECK(g.at(1, 0) == 0);

  cv::Mat deep(1, 2, CV_16UC1);
  deep.at<std::uint16_t>(0, 0) = 65535;
  deep.at<std::uint16_t>(0, 1) = 257 * 100;
  cv::imwrite((dir / "deep.png").string(), deep);
  g = load_grayscale(dir / "deep.png");
  CHECK(g.at(0, 0) == 255);
  CHECK(g.at(1, 0) == 100);
}

TEST_CASE("undecodable file names its path") {
  fixtures::TempDir dir("image");
  std::ofstream(dir / "junk.png") << "not an image";
  try {
    load_grayscale(dir / "junk.png");
    FAIL("expected DecodeError");
  } catch (const DecodeError& e) {
    CHECK(e.path() == dir / "junk.png");
  }
  CHECK_THROWS_AS(load_grayscale(dir / "missing.png"), DecodeError);
}
