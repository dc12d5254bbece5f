#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "glaucofuse/labels.hpp"
#include "glaucofuse/model.hpp"
#include "glaucofuse/training.hpp"

namespace glaucofuse {

/// Trained artifact of one variant: a CNN or the VCDR logistic model.
struct Checkpoint {
  Variant variant = Variant::Proposed;
  std::optional<Model> cnn;
  std::optional<LogisticVcdrModel> logistic;
};

/// Little-endian layout:
///   "GFCK" | u32 version | u32 variant | u32 in_channels | u32 input_pool |
///   u32 feature_dim | u32 use_vcdr | u32 n_blocks | u32 width × n_blocks |
///   u64 n_params | f64 × n_params
/// The logistic variant stores zero backbone fields and [slope, intercept].
std::string serialize_checkpoint(const Checkpoint& checkpoint);
Checkpoint deserialize_checkpoint(const std::string& bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

inline constexpr std::uint32_t kCheckpointVersion = 1;

}  // namespace glaucofuse
