#include <doctest.h>

#include <fstream>
#include <set>

#include "glaucofuse/data.hpp"
#include "glaucofuse/error.hpp"
#include "oracles.hpp"

using namespace glaucofuse;
namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::Usage;
}

TriMask disc_at(int w, int h, int cx, int cy, int r) {
  TriMask m(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int dx = x - cx, dy = y - cy;
      if (dx * dx + dy * dy <= r * r) m.set(x, y, dx * dx + dy * dy <= r * r / 4 ? Region::Cup : Region::Rim);
    }
  }
  return m;
}

std::set<Region> label_set(const TriMask& m) { return {m.labels().begin(), m.labels().end()}; }

}  // namespace

TEST_CASE("parse_manifest examples") {
  const std::string text =
      "image,mask,label,split\n"
      "a.png,ma.png,glaucoma,train\n"
      "b.png,mb.png,normal,val\n"
      "\"c,1.png\",mc.png,normal,test\n"
      "d.png,md.png,glaucoma,test\n";
  const auto m = parse_manifest(text, "/data");
  REQUIRE(m.rows.size() == 4);
  CHECK(m.rows[2].image == "c,1.png");
  CHECK(m.rows[0].label == Label::Glaucoma);
  CHECK(m.rows[1].split == Split::Val);
  CHECK(m.rows[3].line == 5);
  CHECK(m.resolve("a.png") == fs::path("/data/a.png"));
  CHECK(m.rows_in(Split::Test).size() == 2);
  CHECK((m.counts().at({Split::Test, Label::Normal})) == 1);

  CHECK(kind_of([] { parse_manifest("image,mask,label,split\na,b,maybe,train\n", "."); }) == ErrorKind::UnknownLabel);
  try {
    parse_manifest("image,mask,label,split\na,b,normal,train\na,b,maybe,train\n", ".");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK(kind_of([] { parse_manifest("image,mask,label,split\na,b,normal,holdout\n", "."); }) == ErrorKind::UnknownSplit);
  CHECK(kind_of([] { parse_manifest("", "."); }) == ErrorKind::MalformedRow);
  try {
    parse_manifest("", ".");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 1") != std::string::npos);
  }
  CHECK(kind_of([] { parse_manifest("img,mask,label,split\n", "."); }) == ErrorKind::MalformedRow);
  CHECK(kind_of([] { parse_manifest("image,mask,label,split\na,b,normal\n", "."); }) == ErrorKind::MalformedRow);
}

TEST_CASE("load_manifest checks files and round-trips") {
  const auto dir = testing::scratch_dir("manifest");
  CHECK(kind_of([&] { load_manifest(dir / "absent.csv"); }) == ErrorKind::MissingFile);

  write_text(dir / "a.png", "x");
  write_text(dir / "ma.png", "x");
  write_text(dir / "m.csv", "image,mask,label,split\na.png,ma.png,glaucoma,train\nb.png,ma.png,normal,val\n");
  CHECK(kind_of([&] { load_manifest(dir / "m.csv"); }) == ErrorKind::MissingFile);
  const auto lazy = load_manifest(dir / "m.csv", PathCheck::Skip);
  CHECK(lazy.rows.size() == 2);

  write_manifest(lazy, dir / "copy.csv");
  const auto again = load_manifest(dir / "copy.csv", PathCheck::Skip);
  CHECK(again.rows == lazy.rows);
  CHECK(serialize_manifest(again) == serialize_manifest(lazy));
}

TEST_CASE("image io keeps RGB order") {
  const auto dir = testing::scratch_dir("imageio");
  cv::Mat rgb(2, 3, CV_8UC3, cv::Scalar(200, 10, 30));
  write_rgb(dir / "x.png", rgb);
  const auto back = read_rgb(dir / "x.png");
  CHECK(back.at<cv::Vec3b>(1, 2) == cv::Vec3b(200, 10, 30));
  CHECK(kind_of([&] { read_rgb(dir / "missing.png"); }) == ErrorKind::Io);
}

TEST_CASE("crop_roi centers small discs") {
  const auto mask = disc_at(400, 400, 200, 200, 20);
  cv::Mat rgb(400, 400, CV_8UC3);
  cv::randu(rgb, 0, 256);
  const auto roi = crop_roi(rgb, mask);
  CHECK(roi.rgb.rows == 256);
  CHECK(roi.rgb.cols == 256);
  CHECK(roi.window.width == 256);
  CHECK(std::abs(roi.window.x + 128 - 200.5) <= 1.0);
  CHECK(std::abs(roi.window.y + 128 - 200.5) <= 1.0);
  CHECK(label_set(roi.mask) == label_set(mask));
  CHECK(roi.mask.at(128, 128) == Region::Cup);
  CHECK(cv::countNonZero(roi.rgb.reshape(1) != rgb(roi.window).clone().reshape(1)) == 0);
}

TEST_CASE("crop_roi clamps near the corner") {
  const auto mask = disc_at(400, 300, 10, 12, 8);
  const cv::Mat rgb(300, 400, CV_8UC3, cv::Scalar::all(9));
  const auto roi = crop_roi(rgb, mask);
  CHECK(roi.window.x == 0);
  CHECK(roi.window.y == 0);
  CHECK(roi.rgb.size() == cv::Size(256, 256));

  // larger disc: window grows to twice its side, then downsamples
  const auto big = disc_at(400, 400, 300, 300, 90);
  const auto r2 = crop_roi(cv::Mat(400, 400, CV_8UC3, cv::Scalar::all(1)), big);
  CHECK(r2.window.width == 362);
  CHECK(r2.window.x + r2.window.width <= 400);
  CHECK(r2.rgb.size() == cv::Size(256, 256));
  CHECK(label_set(r2.mask) == label_set(big));

  // image smaller than the ROI upsamples
  const auto small = disc_at(100, 100, 50, 50, 10);
  const auto r3 = crop_roi(cv::Mat(100, 100, CV_8UC3, cv::Scalar::all(1)), small);
  CHECK(r3.window == cv::Rect(0, 0, 100, 100));
  CHECK(r3.rgb.size() == cv::Size(256, 256));

  CHECK(kind_of([] { crop_roi(cv::Mat(20, 20, CV_8UC3), TriMask(20, 20)); }) == ErrorKind::EmptyDisc);
  CHECK(kind_of([] { crop_roi(cv::Mat(20, 21, CV_8UC3), TriMask(20, 20)); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("nearest resampling preserves the label set on an 8x8 mask") {
  const auto mask = disc_at(20, 20, 10, 10, 3);
  const cv::Mat rgb(20, 20, CV_8UC3, cv::Scalar::all(5));
  const auto roi = crop_roi(rgb, mask, 8);
  CHECK(roi.mask.width() == 8);
  CHECK(roi.window.width == 14);
  CHECK(label_set(roi.mask) == std::set<Region>{Region::Background, Region::Rim, Region::Cup});
  // crop of a crop keeps the dimensions
  const auto again = crop_roi(roi.rgb, roi.mask, 8);
  CHECK(again.mask.width() == 8);
  CHECK(again.rgb.size() == cv::Size(8, 8));
  for (auto r : label_set(again.mask)) CHECK(label_set(roi.mask).count(r) == 1);
}
