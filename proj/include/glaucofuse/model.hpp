#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "glaucofuse/channel_synthesis.hpp"
#include "glaucofuse/labels.hpp"
#include "glaucofuse/tensor.hpp"

namespace glaucofuse {

/// Toy convolutional trunk: mean-pool stem, then per block
/// 3×3 conv (zero pad) → ReLU → 2×2 mean pool, then global average pooling.
/// The pooled feature width D equals the last block width.
struct BackboneConfig {
  int in_channels = 5;
  std::vector<int> block_widths{8, 16};
  int feature_dim = 16;
  int input_pool = 16;

  friend bool operator==(const BackboneConfig&, const BackboneConfig&) = default;
};

void validate(const BackboneConfig& config);

/// Backbone plus a two-logit linear head. With VCDR fusion the head reads
/// 2D inputs, otherwise D. All parameters live in one flat buffer:
/// conv weights [out][in][3][3] and biases per block, then head weights
/// [2][head_width] and the two head biases.
class Model {
 public:
  Model(BackboneConfig config, bool use_vcdr);

  const BackboneConfig& config() const noexcept { return config_; }
  bool use_vcdr() const noexcept { return use_vcdr_; }
  int feature_dim() const noexcept { return config_.feature_dim; }
  int head_width() const noexcept { return use_vcdr_ ? 2 * config_.feature_dim : config_.feature_dim; }
  std::size_t block_count() const noexcept { return config_.block_widths.size(); }

  std::span<double> params() noexcept { return params_; }
  std::span<const double> params() const noexcept { return params_; }

  std::span<const double> conv_weight(std::size_t block) const;
  std::span<const double> conv_bias(std::size_t block) const;
  std::span<const double> head_weight() const;
  std::span<const double> head_bias() const;
  std::span<double> head_weight();
  std::span<double> head_bias();

  int block_in(std::size_t block) const;
  int block_out(std::size_t block) const { return config_.block_widths[block]; }

  std::size_t conv_weight_offset(std::size_t block) const { return conv_offsets_[block]; }
  std::size_t conv_bias_offset(std::size_t block) const {
    return conv_offsets_[block] + static_cast<std::size_t>(block_out(block) * block_in(block) * 9);
  }
  std::size_t head_weight_offset() const noexcept { return head_offset_; }
  std::size_t head_bias_offset() const noexcept { return head_offset_ + 2 * static_cast<std::size_t>(head_width()); }

  /// He-normal conv weights, scaled-normal head weights, zero biases.
  void initialize(Rng& rng);

  friend bool operator==(const Model&, const Model&) = default;

 private:
  BackboneConfig config_;
  bool use_vcdr_;
  std::vector<std::size_t> conv_offsets_;
  std::size_t head_offset_ = 0;
  std::vector<double> params_;
};

/// concat(features, vcdr · features).
std::vector<double> fuse(std::span<const double> features, double vcdr);

using Logits = std::array<double, 2>;

Logits softmax(const Logits& logits);

/// Softmax probability of the glaucoma class.
double glaucoma_probability(const Logits& logits);

/// Pooled D-wide features of the trunk.
std::vector<double> extract_features(const Model& model, const Tensor& planes);

Logits forward(const Model& model, const Tensor& planes, double vcdr);
Logits forward(const Model& model, const ModelInput& input);

struct Gradients {
  std::vector<double> values;  // same layout as Model::params()
  double loss = 0.0;           // mean cross-entropy
};

/// Mean cross-entropy and its gradient over the batch. VCDR is a constant.
Gradients backward(const Model& model, std::span<const ModelInput> inputs, std::span<const Label> labels);

double batch_loss(const Model& model, std::span<const ModelInput> inputs, std::span<const Label> labels);

}  // namespace glaucofuse
