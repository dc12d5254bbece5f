#include "glaucofuse/channel_synthesis.hpp"

#include <algorithm>
#include <cmath>

#include <opencv2/imgproc.hpp>

#include "glaucofuse/error.hpp"

namespace glaucofuse {

namespace {

void require_same_size(const cv::Mat& a, const TriMask& mask) {
  if (a.cols != mask.width() || a.rows != mask.height()) {
    throw Error(ErrorKind::DimensionMismatch, "plane " + std::to_string(a.cols) + "x" + std::to_string(a.rows) +
                                                  " vs mask " + std::to_string(mask.width()) + "x" +
                                                  std::to_string(mask.height()));
  }
}

void fill_plane(Tensor& t, int c, const cv::Mat1b& plane, ChannelNorm n) {
  auto dst = t.plane(c);
  std::size_t i = 0;
  for (int y = 0; y < plane.rows; ++y) {
    const auto* row = plane.ptr<std::uint8_t>(y);
    for (int x = 0; x < plane.cols; ++x, ++i) dst[i] = (static_cast<double>(row[x]) / 255.0 - n.mean) / n.std;
  }
}

void fill_rgb(Tensor& t, const cv::Mat& rgb, const Normalization& norm) {
  std::size_t i = 0;
  for (int y = 0; y < rgb.rows; ++y) {
    const auto* row = rgb.ptr<cv::Vec3b>(y);
    for (int x = 0; x < rgb.cols; ++x, ++i) {
      for (int c = 0; c < 3; ++c) {
        const auto n = norm.channels[static_cast<std::size_t>(c)];
        t.plane(c)[i] = (static_cast<double>(row[x][c]) / 255.0 - n.mean) / n.std;
      }
    }
  }
}

void require_rgb(const cv::Mat& rgb) {
  if (rgb.empty()) throw Error(ErrorKind::EmptyImage, "image is empty");
  if (rgb.type() != CV_8UC3) throw Error(ErrorKind::ChannelCountMismatch, "expected 3-channel 8-bit image");
}

}  // namespace

cv::Mat1b vessel_map(const cv::Mat1f& green, const TriMask& mask, double t_v, VesselPolarity polarity) {
  require_same_size(green, mask);
  cv::Mat1b out(green.rows, green.cols, std::uint8_t{0});
  for (int y = 0; y < green.rows; ++y) {
    const auto* g = green.ptr<float>(y);
    auto* o = out.ptr<std::uint8_t>(y);
    for (int x = 0; x < green.cols; ++x) {
      if (!in_disc(mask.at(x, y))) continue;
      const double v = g[x];
      const bool hit = polarity == VesselPolarity::Dark ? v < t_v : v > t_v;
      if (hit) o[x] = 255;
    }
  }
  return out;
}

MilestoneStrategy parse_milestone_strategy(const std::string& name) {
  if (name == "band") return MilestoneStrategy::Band;
  if (name == "midpoint") return MilestoneStrategy::Midpoint;
  throw Error(ErrorKind::InvalidConfig, "unknown milestone strategy '" + name + "'");
}

std::string to_string(MilestoneStrategy s) { return s == MilestoneStrategy::Band ? "band" : "midpoint"; }

VesselPolarity parse_vessel_polarity(const std::string& name) {
  if (name == "dark") return VesselPolarity::Dark;
  if (name == "bright") return VesselPolarity::Bright;
  throw Error(ErrorKind::InvalidConfig, "unknown vessel polarity '" + name + "'");
}

std::string to_string(VesselPolarity p) { return p == VesselPolarity::Dark ? "dark" : "bright"; }

std::vector<double> milestones_from_means(std::span<const double> means, double t, MilestoneStrategy strategy) {
  if (!(t > 0.0)) throw Error(ErrorKind::NonPositiveT, "t must be positive, got " + std::to_string(t));
  std::vector<double> ms;
  switch (strategy) {
    case MilestoneStrategy::Band:
      for (double m : means) {
        ms.push_back(m - t);
        ms.push_back(m + t);
      }
      break;
    case MilestoneStrategy::Midpoint: {
      std::vector<double> sorted(means.begin(), means.end());
      std::sort(sorted.begin(), sorted.end());
      for (std::size_t i = 0; i < sorted.size(); ++i) {
        ms.push_back(sorted[i]);
        if (i + 1 < sorted.size()) ms.push_back(sorted[i] + (sorted[i + 1] - sorted[i]) / 2.0);
      }
      break;
    }
  }
  for (double& m : ms) m = std::clamp(m, 0.0, 255.0);
  std::sort(ms.begin(), ms.end());
  ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
  return ms;
}

std::vector<double> milestones(const RegionStats& stats, double t, MilestoneStrategy strategy) {
  const std::array<double, 3> means{stats.back_mean, stats.rim_mean, stats.cup_mean};
  return milestones_from_means(means, t, strategy);
}

std::vector<std::uint8_t> palette_levels(std::size_t milestone_count) {
  std::vector<std::uint8_t> levels;
  levels.reserve(milestone_count + 1);
  for (std::size_t i = 0; i <= milestone_count; ++i) {
    const double v = milestone_count == 0 ? 0.0 : 255.0 * static_cast<double>(i) / static_cast<double>(milestone_count);
    levels.push_back(static_cast<std::uint8_t>(std::lround(v)));
  }
  return levels;
}

ReducedChannel reduce_complexity(const cv::Mat1f& green, const TriMask& mask, std::span<const double> ms) {
  require_same_size(green, mask);
  if (ms.empty()) throw Error(ErrorKind::UnsortedMilestones, "milestone list is empty");
  for (std::size_t i = 1; i < ms.size(); ++i) {
    if (!(ms[i - 1] < ms[i])) throw Error(ErrorKind::UnsortedMilestones, "milestones must be strictly increasing");
  }
  ReducedChannel out;
  out.palette = palette_levels(ms.size());
  out.values = cv::Mat1b(green.rows, green.cols, std::uint8_t{0});
  for (int y = 0; y < green.rows; ++y) {
    const auto* g = green.ptr<float>(y);
    auto* o = out.values.ptr<std::uint8_t>(y);
    for (int x = 0; x < green.cols; ++x) {
      const double v = g[x];
      const auto bin = static_cast<std::size_t>(std::upper_bound(ms.begin(), ms.end(), v) - ms.begin());
      o[x] = out.palette[bin];
    }
  }
  for (int y = 0; y < green.rows; ++y) {
    auto* o = out.values.ptr<std::uint8_t>(y);
    for (int x = 0; x < green.cols; ++x) {
      if (!in_disc(mask.at(x, y))) o[x] = 0;
    }
  }
  return out;
}

ModelInput assemble(const cv::Mat& rgb, const cv::Mat1b& vessel, const cv::Mat1b& reduced, Vcdr vcdr,
                    const Normalization& norm) {
  require_rgb(rgb);
  if (vessel.size() != rgb.size() || reduced.size() != rgb.size()) {
    throw Error(ErrorKind::DimensionMismatch, "all five planes must share dimensions");
  }
  ModelInput in{Tensor(5, rgb.rows, rgb.cols), vcdr, 3};
  fill_rgb(in.planes, rgb, norm);
  fill_plane(in.planes, 3, vessel, norm.channels[3]);
  fill_plane(in.planes, 4, reduced, norm.channels[4]);
  return in;
}

ModelInput assemble_rgb(const cv::Mat& rgb, Vcdr vcdr, const Normalization& norm) {
  require_rgb(rgb);
  ModelInput in{Tensor(3, rgb.rows, rgb.cols), vcdr, 3};
  fill_rgb(in.planes, rgb, norm);
  return in;
}

ModelInput assemble_mask(const TriMask& mask, Vcdr vcdr, const Normalization& norm, const LabelMap& encoding) {
  const cv::Mat1b gray = render_mask(mask, encoding);
  ModelInput in{Tensor(3, mask.height(), mask.width()), vcdr, 0};
  for (int c = 0; c < 3; ++c) fill_plane(in.planes, c, gray, norm.mask);
  return in;
}

void gaussian_blur_plane(std::span<double> plane, int height, int width, double sigma) {
  // Filtering runs in single precision; the result is written back as double.
  cv::Mat view(height, width, CV_64F, plane.data());
  cv::Mat single;
  view.convertTo(single, CV_32F);
  cv::GaussianBlur(single, single, cv::Size(0, 0), sigma, sigma, cv::BORDER_REFLECT_101);
  single.convertTo(view, CV_64F);
}

ModelInput augment(ModelInput input, Rng& rng, const AugmentConfig& config) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ModelInput out = std::move(input);
  if (unit(rng) < config.flip_probability) out.planes = flip_horizontal(out.planes);
  if (unit(rng) < config.blur_probability) {
    std::uniform_real_distribution<double> sigma_dist(config.blur_sigma_min, config.blur_sigma_max);
    const double sigma = sigma_dist(rng);
    for (int c = 0; c < out.photo_channels; ++c) {
      gaussian_blur_plane(out.planes.plane(c), out.planes.height(), out.planes.width(), sigma);
    }
  }
  return out;
}

cv::Mat1b flip_horizontal(const cv::Mat1b& plane) {
  cv::Mat1b out;
  cv::flip(plane, out, 1);
  return out;
}

cv::Mat1f flip_horizontal(const cv::Mat1f& plane) {
  cv::Mat1f out;
  cv::flip(plane, out, 1);
  return out;
}

}  // namespace glaucofuse
