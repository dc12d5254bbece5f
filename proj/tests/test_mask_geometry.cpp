#include <doctest.h>

#include <random>

#include "glaucofuse/data_synth.hpp"
#include "glaucofuse/error.hpp"
#include "glaucofuse/mask_geometry.hpp"

using namespace glaucofuse;

namespace {

cv::Mat gray_image(int rows, int cols, std::initializer_list<int> values) {
  cv::Mat m(rows, cols, CV_8UC1);
  auto it = values.begin();
  for (int y = 0; y < rows; ++y) {
    for (int x = 0; x < cols; ++x) m.at<std::uint8_t>(y, x) = static_cast<std::uint8_t>(*it++);
  }
  return m;
}

/// Disc rows [d0, d1], cup rows [c0, c1], in a single column band.
TriMask banded_mask(int width, int height, int d0, int d1, int c0, int c1) {
  TriMask m(width, height);
  for (int y = d0; y <= d1; ++y) {
    for (int x = 2; x < width - 2; ++x) m.set(x, y, (y >= c0 && y <= c1) ? Region::Cup : Region::Rim);
  }
  return m;
}

TriMask random_mask(std::mt19937_64& rng, int w, int h) {
  std::uniform_int_distribution<int> label(0, 2);
  TriMask m(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) m.set(x, y, static_cast<Region>(label(rng)));
  }
  return m;
}

}  // namespace

TEST_CASE("parse_mask maps gray levels with the default encoding") {
  const auto all_bg = parse_mask(cv::Mat(4, 4, CV_8UC1, cv::Scalar(255)));
  for (auto r : all_bg.labels()) CHECK(r == Region::Background);

  const auto m = parse_mask(gray_image(2, 2, {0, 128, 128, 255}));
  CHECK(m.at(0, 0) == Region::Cup);
  CHECK(m.at(1, 0) == Region::Rim);
  CHECK(m.at(0, 1) == Region::Rim);
  CHECK(m.at(1, 1) == Region::Background);
}

TEST_CASE("parse_mask rejects unmapped gray levels and empty images") {
  cv::Mat img(3, 3, CV_8UC1, cv::Scalar(255));
  img.at<std::uint8_t>(0, 0) = 57;
  img.at<std::uint8_t>(1, 2) = 57;
  try {
    parse_mask(img);
    FAIL("expected UnknownLabelValue");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnknownLabelValue);
    CHECK(std::string(e.what()).find("57") != std::string::npos);
    CHECK(std::string(e.what()).find("2 pixels") != std::string::npos);
  }
  try {
    parse_mask(cv::Mat());
    FAIL("expected EmptyImage");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyImage);
  }
}

TEST_CASE("custom label map parses and round-trips through render_mask") {
  const auto map = LabelMap::parse("0:background, 1:rim, 2:cup");
  const auto m = parse_mask(gray_image(1, 3, {2, 1, 0}), map);
  CHECK(m.at(0, 0) == Region::Cup);
  CHECK(m.at(2, 0) == Region::Background);
  CHECK(parse_mask(render_mask(m, map), map) == m);
  CHECK_THROWS_AS(LabelMap::parse("300:cup"), Error);
  CHECK_THROWS_AS(LabelMap::parse("0:sclera"), Error);
}

TEST_CASE("region_coords") {
  const TriMask bg(3, 3);
  CHECK(region_coords(bg, Region::Cup).empty());
  CHECK(region_coords(bg, Region::Background).size() == 9);

  const auto m = parse_mask(gray_image(2, 2, {0, 128, 128, 255}));
  const auto rim = region_coords(m, Region::Rim);
  REQUIRE(rim.size() == 2);
  CHECK(rim[0] == Pixel{1, 0});
  CHECK(rim[1] == Pixel{0, 1});
}

TEST_CASE("region sets partition the mask") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = random_mask(rng, 3 + trial % 7, 2 + trial % 5);
    const auto b = region_coords(m, Region::Background).size();
    const auto r = region_coords(m, Region::Rim).size();
    const auto c = region_coords(m, Region::Cup).size();
    CHECK(b + r + c == static_cast<std::size_t>(m.width() * m.height()));
  }
}

TEST_CASE("compute_vcdr examples") {
  CHECK(compute_vcdr(banded_mask(20, 80, 10, 59, 1, 0)).value == 0.0);
  CHECK(compute_vcdr(banded_mask(20, 80, 10, 49, 20, 39)).value == 0.5);
  CHECK(compute_vcdr(banded_mask(20, 80, 10, 49, 10, 49)).value == 1.0);
  CHECK_THROWS_AS(compute_vcdr(TriMask(5, 5)), Error);
}

TEST_CASE("compute_vcdr uses bounding extent across separate cup blobs") {
  TriMask m(10, 30);
  for (int y = 5; y < 25; ++y) m.set(4, y, Region::Rim);
  m.set(4, 8, Region::Cup);
  m.set(4, 17, Region::Cup);
  CHECK(compute_vcdr(m).value == doctest::Approx(10.0 / 20.0));
}

TEST_CASE("compute_vcdr is invariant under horizontal flip") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    auto m = random_mask(rng, 9, 11);
    m.set(0, 0, Region::Rim);
    CHECK(compute_vcdr(flip_horizontal(m)) == compute_vcdr(m));
    CHECK(flip_horizontal(flip_horizontal(m)) == m);
  }
}

TEST_CASE("synthetic ellipse masks satisfy the pixel quantization bound") {
  SynthConfig cfg;
  cfg.n_samples = 40;
  cfg.seed = 5;
  cfg.noise_sigma = 0.0;
  for (std::size_t i = 0; i < cfg.n_samples; ++i) {
    const auto s = generate_sample(cfg, i);
    const int vdd = vertical_extent(s.mask, [](Region r) { return in_disc(r); });
    CHECK(std::abs(compute_vcdr(s.mask).value - s.vertical_ratio) <= 2.0 / vdd);
  }
}
