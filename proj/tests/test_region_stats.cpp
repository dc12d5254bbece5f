#include <doctest.h>

#include <algorithm>
#include <random>

#include "glaucofuse/error.hpp"
#include "glaucofuse/region_stats.hpp"

using namespace glaucofuse;

namespace {

cv::Mat rgb_with_green(int rows, int cols, std::initializer_list<int> greens) {
  cv::Mat m(rows, cols, CV_8UC3, cv::Scalar(7, 0, 9));
  auto it = greens.begin();
  for (int y = 0; y < rows; ++y) {
    for (int x = 0; x < cols; ++x) m.at<cv::Vec3b>(y, x)[1] = static_cast<std::uint8_t>(*it++);
  }
  return m;
}

}  // namespace

TEST_CASE("green_channel extracts the G plane") {
  cv::Mat px(1, 1, CV_8UC3, cv::Scalar(10, 200, 30));
  CHECK(green_channel(px)(0, 0) == 200.0f);

  const auto zero = green_channel(cv::Mat(4, 5, CV_8UC3, cv::Scalar::all(0)));
  CHECK(zero.rows == 4);
  CHECK(zero.cols == 5);
  CHECK(cv::countNonZero(zero) == 0);

  const auto two = green_channel(rgb_with_green(1, 2, {50, 150}));
  CHECK(two(0, 0) == 50.0f);
  CHECK(two(0, 1) == 150.0f);

  CHECK_THROWS_AS(green_channel(cv::Mat(2, 2, CV_8UC1, cv::Scalar(0))), Error);
}

TEST_CASE("region_mean examples and errors") {
  cv::Mat1f plane(3, 3);
  for (int i = 0; i < 9; ++i) plane(i / 3, i % 3) = static_cast<float>(i + 1);
  std::vector<Pixel> all;
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 3; ++x) all.push_back({x, y});
  }
  CHECK(region_mean(plane, all) == 5.0);

  cv::Mat1f two(1, 2);
  two(0, 0) = 60;
  two(0, 1) = 140;
  CHECK(region_mean(two, std::vector<Pixel>{{0, 0}, {1, 0}}) == 100.0);
  CHECK(region_mean(cv::Mat1f(1, 1, 100.0f), std::vector<Pixel>{{0, 0}}) == 100.0);

  CHECK_THROWS_AS(region_mean(two, std::vector<Pixel>{}), Error);
  try {
    region_mean(two, std::vector<Pixel>{{2, 0}});
    FAIL("expected CoordOutOfBounds");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::CoordOutOfBounds);
  }
}

TEST_CASE("region_mean is permutation invariant") {
  std::mt19937_64 rng(1);
  cv::Mat1f plane(16, 16);
  cv::randu(plane, 0, 255);
  std::vector<Pixel> coords;
  for (int i = 0; i < 40; ++i) coords.push_back({static_cast<int>(rng() % 16), static_cast<int>(rng() % 16)});
  const double ref = region_mean(plane, coords);
  for (int k = 0; k < 10; ++k) {
    std::shuffle(coords.begin(), coords.end(), rng);
    CHECK(region_mean(plane, coords) == doctest::Approx(ref).epsilon(1e-14));
  }
}

TEST_CASE("vessel_threshold is the background/rim midpoint") {
  CHECK(vessel_threshold(60, 140) == 100.0);
  CHECK(vessel_threshold(73.5, 73.5) == 73.5);
  CHECK(vessel_threshold(140, 60) == 100.0);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 255);
  for (int i = 0; i < 100; ++i) {
    const double b = u(rng), r = u(rng);
    const double t = vessel_threshold(b, r);
    CHECK(t >= std::min(b, r));
    CHECK(t <= std::max(b, r));
  }
}

TEST_CASE("compute_stats examples") {
  TriMask mask(2, 2);
  mask.set(0, 0, Region::Cup);
  mask.set(1, 0, Region::Rim);
  const auto s = compute_stats(rgb_with_green(2, 2, {10, 30, 50, 70}), mask);
  CHECK(s.cup_mean == 10.0);
  CHECK(s.rim_mean == 30.0);
  CHECK(s.back_mean == 60.0);
  CHECK(s.t_v == 45.0);

  const auto flat = compute_stats(cv::Mat(2, 2, CV_8UC3, cv::Scalar(0, 128, 0)), mask);
  CHECK(flat.back_mean == 128.0);
  CHECK(flat.rim_mean == 128.0);
  CHECK(flat.cup_mean == 128.0);
  CHECK(flat.t_v == 128.0);

  TriMask no_rim(2, 2);
  no_rim.set(0, 0, Region::Cup);
  try {
    compute_stats(rgb_with_green(2, 2, {1, 2, 3, 4}), no_rim);
    FAIL("expected EmptyRegion");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyRegion);
    CHECK(std::string(e.what()).find("rim") != std::string::npos);
  }
  CHECK_THROWS_AS(compute_stats(cv::Mat(3, 2, CV_8UC3, cv::Scalar::all(0)), mask), Error);
}

TEST_CASE("adding a constant shifts every statistic by that constant") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    TriMask mask(12, 12);
    for (int y = 3; y < 9; ++y) {
      for (int x = 3; x < 9; ++x) mask.set(x, y, (x > 4 && x < 7 && y > 4 && y < 7) ? Region::Cup : Region::Rim);
    }
    cv::Mat img(12, 12, CV_8UC3);
    cv::randu(img, 0, 200);
    const int k = static_cast<int>(rng() % 50);
    cv::Mat shifted = img.clone();
    shifted.forEach<cv::Vec3b>([k](cv::Vec3b& p, const int*) { p[1] = static_cast<std::uint8_t>(p[1] + k); });
    const auto a = compute_stats(img, mask);
    const auto b = compute_stats(shifted, mask);
    CHECK(b.back_mean == doctest::Approx(a.back_mean + k).epsilon(1e-12));
    CHECK(b.rim_mean == doctest::Approx(a.rim_mean + k).epsilon(1e-12));
    CHECK(b.cup_mean == doctest::Approx(a.cup_mean + k).epsilon(1e-12));
    CHECK(b.t_v == doctest::Approx(a.t_v + k).epsilon(1e-12));
  }
}
