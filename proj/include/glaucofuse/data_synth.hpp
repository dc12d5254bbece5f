#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <opencv2/core.hpp>

#include "glaucofuse/data.hpp"
#include "glaucofuse/labels.hpp"
#include "glaucofuse/mask_geometry.hpp"

namespace glaucofuse {

struct RatioRange {
  double min = 0.0;
  double max = 0.0;
};

/// Generator settings. Ratios are cup/disc semi-axis ratios per class.
struct SynthConfig {
  std::size_t n_samples = 200;
  std::uint64_t seed = 1;
  RatioRange glaucoma{0.6, 0.9};
  RatioRange normal{0.2, 0.5};
  /// Replaces the class ranges with overlapping ones so that VCDR alone
  /// cannot separate the classes; the horizontal cup extent still differs.
  bool overlap = false;
  RatioRange overlap_glaucoma{0.45, 0.85};
  RatioRange overlap_normal{0.25, 0.65};
  double glaucoma_fraction = 0.5;
  int image_size = 320;
  int disc_radius_min = 48;
  int disc_radius_max = 56;
  int back_level = 90;
  int rim_level = 150;
  int cup_level = 205;
  int level_jitter = 8;
  int vessel_count_min = 3;
  int vessel_count_max = 6;
  int vessel_width_min = 2;
  int vessel_width_max = 4;
  int vessel_depth = 45;
  double noise_sigma = 4.0;
};

void validate(const SynthConfig& config);

struct SynthSample {
  std::string id;
  cv::Mat rgb;  // R, G, B
  TriMask mask{1, 1};
  Label label = Label::Normal;
  Split split = Split::Train;
  double vertical_ratio = 0.0;    // cup/disc vertical semi-axis ratio
  double horizontal_ratio = 0.0;  // cup/disc horizontal semi-axis ratio
  int disc_semi_axis = 0;         // vertical semi-axis in pixels
  int back_level = 0;
  int rim_level = 0;
  int cup_level = 0;
};

struct SynthDataset {
  std::vector<SynthSample> samples;
  Manifest manifest;  // paths relative to the output directory
};

/// Label of sample `index`, drawn from its own stream.
Label synth_label(const SynthConfig& config, std::size_t index);

/// Stratified 70/15/15 assignment over all samples.
std::vector<Split> synth_splits(const SynthConfig& config);

/// One sample; the split field is left as Train.
SynthSample generate_sample(const SynthConfig& config, std::size_t index);

SynthDataset generate(const SynthConfig& config);

/// Writes images/<id>.png, masks/<id>.png and manifest.csv.
void write_synth(const SynthDataset& dataset, const std::filesystem::path& out_dir);

}  // namespace glaucofuse
