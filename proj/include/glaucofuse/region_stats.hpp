#pragma once

#include <span>

#include <opencv2/core.hpp>

#include "glaucofuse/mask_geometry.hpp"

namespace glaucofuse {

/// Green-channel means of the three mask regions and the vessel threshold.
struct RegionStats {
  double back_mean = 0.0;
  double rim_mean = 0.0;
  double cup_mean = 0.0;
  double t_v = 0.0;
};

/// G plane of an 8-bit RGB image (channel order R, G, B) as floats in [0, 255].
cv::Mat1f green_channel(const cv::Mat& rgb);

/// Arithmetic mean of the plane over `coords`, accumulated in double.
double region_mean(const cv::Mat1f& green, std::span<const Pixel> coords);

/// Midpoint between the background and rim means.
double vessel_threshold(double back_mean, double rim_mean);

RegionStats compute_stats(const cv::Mat& rgb, const TriMask& mask);

}  // namespace glaucofuse
