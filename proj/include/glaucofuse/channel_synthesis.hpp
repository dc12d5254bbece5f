#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <opencv2/core.hpp>

#include "glaucofuse/mask_geometry.hpp"
#include "glaucofuse/region_stats.hpp"
#include "glaucofuse/tensor.hpp"

namespace glaucofuse {

using Rng = std::mt19937_64;

/// Which side of the threshold counts as vessel.
enum class VesselPolarity { Dark, Bright };

/// Binary {0, 255} map; every background pixel is 0.
cv::Mat1b vessel_map(const cv::Mat1f& green, const TriMask& mask, double t_v,
                     VesselPolarity polarity = VesselPolarity::Dark);

/// How region means are turned into quantization milestones.
///   Band:     {m - t, m + t} for each mean m
///   Midpoint: each mean plus the midpoints between adjacent sorted means
enum class MilestoneStrategy { Band, Midpoint };

MilestoneStrategy parse_milestone_strategy(const std::string& name);
std::string to_string(MilestoneStrategy s);
VesselPolarity parse_vessel_polarity(const std::string& name);
std::string to_string(VesselPolarity p);

/// Sorted, clamped to [0, 255], strictly increasing milestone list.
std::vector<double> milestones_from_means(std::span<const double> means, double t,
                                          MilestoneStrategy strategy = MilestoneStrategy::Band);

std::vector<double> milestones(const RegionStats& stats, double t,
                               MilestoneStrategy strategy = MilestoneStrategy::Band);

/// Output levels round(255 i / K) for i = 0..K.
std::vector<std::uint8_t> palette_levels(std::size_t milestone_count);

struct ReducedChannel {
  cv::Mat1b values;
  std::vector<std::uint8_t> palette;
};

/// Quantizes the green plane into K + 1 bins split at the milestones; bin i
/// covers [m_i, m_{i+1}) with open ends. Background is painted 0 afterward.
ReducedChannel reduce_complexity(const cv::Mat1f& green, const TriMask& mask, std::span<const double> ms);

struct ChannelNorm {
  double mean = 0.0;
  double std = 1.0;
};

/// Per-plane standardization applied after scaling to [0, 1].
struct Normalization {
  std::array<ChannelNorm, 5> channels{{{0.485, 0.229}, {0.456, 0.224}, {0.406, 0.225}, {0.5, 0.5}, {0.5, 0.5}}};
  ChannelNorm mask{0.5, 0.5};
};

/// Network input planes with the VCDR scalar riding along. The first
/// `photo_channels` planes are photographic (eligible for blur).
struct ModelInput {
  Tensor planes;
  Vcdr vcdr;
  int photo_channels = 0;
};

/// R, G, B, vessel, reduced; each divided by 255 then standardized.
ModelInput assemble(const cv::Mat& rgb, const cv::Mat1b& vessel, const cv::Mat1b& reduced, Vcdr vcdr,
                    const Normalization& norm = {});

/// R, G, B only.
ModelInput assemble_rgb(const cv::Mat& rgb, Vcdr vcdr, const Normalization& norm = {});

/// Trimap rendered to gray and repeated into three planes.
ModelInput assemble_mask(const TriMask& mask, Vcdr vcdr, const Normalization& norm = {},
                         const LabelMap& encoding = LabelMap::refuge());

struct AugmentConfig {
  double flip_probability = 0.5;
  double blur_probability = 0.5;
  double blur_sigma_min = 0.1;
  double blur_sigma_max = 2.0;
};

/// Random joint horizontal flip of all planes, then random Gaussian blur of
/// the photographic planes only.
ModelInput augment(ModelInput input, Rng& rng, const AugmentConfig& config);

/// In-place Gaussian blur of one plane.
void gaussian_blur_plane(std::span<double> plane, int height, int width, double sigma);

cv::Mat1b flip_horizontal(const cv::Mat1b& plane);
cv::Mat1f flip_horizontal(const cv::Mat1f& plane);

}  // namespace glaucofuse
