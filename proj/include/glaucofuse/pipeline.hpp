#pragma once

#include <optional>
#include <string>
#include <vector>

#include <opencv2/core.hpp>

#include "glaucofuse/channel_synthesis.hpp"
#include "glaucofuse/labels.hpp"
#include "glaucofuse/mask_geometry.hpp"

namespace glaucofuse {

struct PrepConfig {
  int roi_size = 256;
  double roi_margin = 2.0;
  double t = 20.0;
  MilestoneStrategy strategy = MilestoneStrategy::Band;
  VesselPolarity polarity = VesselPolarity::Dark;
};

/// One sample after ROI cropping and channel synthesis, stored as bytes.
struct PreparedSample {
  std::string id;
  cv::Mat rgb;  // roi_size² R, G, B
  TriMask mask{1, 1};
  cv::Mat1b vessel;
  ReducedChannel reduced;
  double back_mean = 0.0;
  double rim_mean = 0.0;
  std::optional<double> cup_mean;  // empty when the mask has no cup
  double t_v = 0.0;
  Vcdr vcdr;
  Label label = Label::Normal;
  Split split = Split::Train;
};

/// VCDR on the full-resolution mask, then ROI crop, region statistics,
/// vessel map and reduced channel on the ROI. A mask without cup yields
/// VCDR 0 and milestones built from background and rim only.
PreparedSample prepare_sample(const cv::Mat& rgb, const TriMask& mask, const PrepConfig& config = {});

/// Network input for a variant; throws for the logistic variant.
ModelInput build_input(const PreparedSample& sample, Variant variant, const Normalization& norm = {},
                       const LabelMap& encoding = LabelMap::refuge());

}  // namespace glaucofuse
