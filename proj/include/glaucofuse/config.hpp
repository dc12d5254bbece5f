#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "glaucofuse/channel_synthesis.hpp"
#include "glaucofuse/data_synth.hpp"
#include "glaucofuse/labels.hpp"
#include "glaucofuse/mask_geometry.hpp"
#include "glaucofuse/model.hpp"
#include "glaucofuse/pipeline.hpp"
#include "glaucofuse/training.hpp"

namespace glaucofuse {

/// Every tunable of a run. Defaults hold for keys absent from the file.
struct RunConfig {
  Variant variant = Variant::Proposed;
  std::uint64_t seed = 1;
  TrainConfig train;
  Normalization normalization;
  PrepConfig prep;
  LabelMap label_map = LabelMap::refuge();
  BackboneConfig backbone;
  LogisticConfig logistic;
  SynthConfig synth;

  std::filesystem::path manifest;
  std::filesystem::path out = "out";
  std::filesystem::path checkpoint;
  Split eval_split = Split::Test;

  /// Backbone with in_channels set for the variant.
  BackboneConfig backbone_for_variant() const;
};

/// Applies `key = value` lines (# starts a comment) on top of `base`.
RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// Re-emits every key in file syntax.
std::string format_config(const RunConfig& config);

void validate(const RunConfig& config);

}  // namespace glaucofuse
