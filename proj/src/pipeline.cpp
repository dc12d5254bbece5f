#include "glaucofuse/pipeline.hpp"

#include <vector>

#include "glaucofuse/data.hpp"
#include "glaucofuse/error.hpp"
#include "glaucofuse/region_stats.hpp"

namespace glaucofuse {

PreparedSample prepare_sample(const cv::Mat& rgb, const TriMask& mask, const PrepConfig& config) {
  PreparedSample out;
  out.vcdr = compute_vcdr(mask);

  Roi roi = crop_roi(rgb, mask, config.roi_size, config.roi_margin);
  const cv::Mat1f green = green_channel(roi.rgb);

  auto mean_of = [&](Region r) -> std::optional<double> {
    const auto coords = region_coords(roi.mask, r);
    if (coords.empty()) return std::nullopt;
    return region_mean(green, coords);
  };
  const auto back = mean_of(Region::Background);
  const auto rim = mean_of(Region::Rim);
  if (!back) throw Error(ErrorKind::EmptyRegion, "background");
  if (!rim) throw Error(ErrorKind::EmptyRegion, "rim");
  out.back_mean = *back;
  out.rim_mean = *rim;
  out.cup_mean = mean_of(Region::Cup);
  out.t_v = vessel_threshold(out.back_mean, out.rim_mean);

  std::vector<double> means{out.back_mean, out.rim_mean};
  if (out.cup_mean) means.push_back(*out.cup_mean);
  const auto ms = milestones_from_means(means, config.t, config.strategy);

  out.vessel = vessel_map(green, roi.mask, out.t_v, config.polarity);
  out.reduced = reduce_complexity(green, roi.mask, ms);
  out.rgb = std::move(roi.rgb);
  out.mask = std::move(roi.mask);
  return out;
}

ModelInput build_input(const PreparedSample& sample, Variant variant, const Normalization& norm,
                       const LabelMap& encoding) {
  switch (variant) {
    case Variant::Proposed:
      return assemble(sample.rgb, sample.vessel, sample.reduced.values, sample.vcdr, norm);
    case Variant::FundusVcdr:
    case Variant::Fundus:
      return assemble_rgb(sample.rgb, sample.vcdr, norm);
    case Variant::MaskVcdr:
    case Variant::Mask:
      return assemble_mask(sample.mask, sample.vcdr, norm, encoding);
    case Variant::VcdrLogistic:
      break;
  }
  throw Error(ErrorKind::InvalidConfig, "the vcdr_logistic variant has no image input");
}

}  // namespace glaucofuse
