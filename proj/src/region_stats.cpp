#include "glaucofuse/region_stats.hpp"

#include "glaucofuse/error.hpp"

namespace glaucofuse {

cv::Mat1f green_channel(const cv::Mat& rgb) {
  if (rgb.empty()) throw Error(ErrorKind::EmptyImage, "image is empty");
  if (rgb.type() != CV_8UC3) {
    throw Error(ErrorKind::ChannelCountMismatch,
                "expected 3-channel 8-bit image, got " + std::to_string(rgb.channels()) + " channels");
  }
  cv::Mat1f green(rgb.rows, rgb.cols);
  for (int y = 0; y < rgb.rows; ++y) {
    const auto* src = rgb.ptr<cv::Vec3b>(y);
    auto* dst = green.ptr<float>(y);
    for (int x = 0; x < rgb.cols; ++x) dst[x] = static_cast<float>(src[x][1]);
  }
  return green;
}

double region_mean(const cv::Mat1f& green, std::span<const Pixel> coords) {
  if (coords.empty()) throw Error(ErrorKind::EmptyRegion, "coordinate set is empty");
  double sum = 0.0;
  for (const auto& p : coords) {
    if (p.x < 0 || p.y < 0 || p.x >= green.cols || p.y >= green.rows) {
      throw Error(ErrorKind::CoordOutOfBounds,
                  "(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ") outside " +
                      std::to_string(green.cols) + "x" + std::to_string(green.rows));
    }
    sum += static_cast<double>(green(p.y, p.x));
  }
  return sum / static_cast<double>(coords.size());
}

double vessel_threshold(double back_mean, double rim_mean) {
  return back_mean + (rim_mean - back_mean) / 2.0;
}

RegionStats compute_stats(const cv::Mat& rgb, const TriMask& mask) {
  const cv::Mat1f green = green_channel(rgb);
  if (green.cols != mask.width() || green.rows != mask.height()) {
    throw Error(ErrorKind::DimensionMismatch, "image and mask dimensions differ");
  }
  auto mean_of = [&](Region r) {
    const auto coords = region_coords(mask, r);
    if (coords.empty()) throw Error(ErrorKind::EmptyRegion, to_string(r));
    return region_mean(green, coords);
  };
  RegionStats s;
  s.back_mean = mean_of(Region::Background);
  s.rim_mean = mean_of(Region::Rim);
  s.cup_mean = mean_of(Region::Cup);
  s.t_v = vessel_threshold(s.back_mean, s.rim_mean);
  return s;
}

}  // namespace glaucofuse
