#include "glaucofuse/model.hpp"

#include <algorithm>
#include <cmath>

#include "glaucofuse/error.hpp"

namespace glaucofuse {

void validate(const BackboneConfig& config) {
  if (config.in_channels != 3 && config.in_channels != 5) {
    throw Error(ErrorKind::InvalidConfig, "in_channels must be 3 or 5");
  }
  if (config.block_widths.empty()) throw Error(ErrorKind::InvalidConfig, "at least one conv block required");
  for (int w : config.block_widths) {
    if (w < 1) throw Error(ErrorKind::InvalidConfig, "block widths must be positive");
  }
  if (config.feature_dim < 1) throw Error(ErrorKind::InvalidConfig, "feature_dim must be >= 1");
  if (config.feature_dim != config.block_widths.back()) {
    throw Error(ErrorKind::InvalidConfig, "feature_dim must equal the last block width");
  }
  if (config.input_pool < 1) throw Error(ErrorKind::InvalidConfig, "input_pool must be >= 1");
}

Model::Model(BackboneConfig config, bool use_vcdr) : config_(std::move(config)), use_vcdr_(use_vcdr) {
  validate(config_);
  std::size_t offset = 0;
  for (std::size_t b = 0; b < config_.block_widths.size(); ++b) {
    conv_offsets_.push_back(offset);
    offset += static_cast<std::size_t>(block_out(b) * block_in(b) * 9 + block_out(b));
  }
  head_offset_ = offset;
  offset += 2 * static_cast<std::size_t>(head_width()) + 2;
  params_.assign(offset, 0.0);
}

int Model::block_in(std::size_t block) const {
  return block == 0 ? config_.in_channels : config_.block_widths[block - 1];
}

std::span<const double> Model::conv_weight(std::size_t block) const {
  return std::span<const double>(params_).subspan(conv_weight_offset(block),
                                                  static_cast<std::size_t>(block_out(block) * block_in(block) * 9));
}

std::span<const double> Model::conv_bias(std::size_t block) const {
  return std::span<const double>(params_).subspan(conv_bias_offset(block), static_cast<std::size_t>(block_out(block)));
}

std::span<const double> Model::head_weight() const {
  return std::span<const double>(params_).subspan(head_weight_offset(), 2 * static_cast<std::size_t>(head_width()));
}

std::span<const double> Model::head_bias() const {
  return std::span<const double>(params_).subspan(head_bias_offset(), 2);
}

std::span<double> Model::head_weight() {
  return std::span<double>(params_).subspan(head_weight_offset(), 2 * static_cast<std::size_t>(head_width()));
}

std::span<double> Model::head_bias() { return std::span<double>(params_).subspan(head_bias_offset(), 2); }

void Model::initialize(Rng& rng) {
  std::fill(params_.begin(), params_.end(), 0.0);
  for (std::size_t b = 0; b < block_count(); ++b) {
    std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / static_cast<double>(block_in(b) * 9)));
    const std::size_t n = static_cast<std::size_t>(block_out(b) * block_in(b) * 9);
    for (std::size_t i = 0; i < n; ++i) params_[conv_weight_offset(b) + i] = dist(rng);
  }
  std::normal_distribution<double> head(0.0, std::sqrt(1.0 / static_cast<double>(head_width())));
  for (auto& w : head_weight()) w = head(rng);
}

std::vector<double> fuse(std::span<const double> features, double vcdr) {
  std::vector<double> out(features.begin(), features.end());
  out.reserve(2 * features.size());
  for (double f : features) out.push_back(vcdr * f);
  return out;
}

Logits softmax(const Logits& logits) {
  const double m = std::max(logits[0], logits[1]);
  const double e0 = std::exp(logits[0] - m);
  const double e1 = std::exp(logits[1] - m);
  const double z = e0 + e1;
  return {e0 / z, e1 / z};
}

double glaucoma_probability(const Logits& logits) { return softmax(logits)[1]; }

namespace {

/// Per-sample intermediate values kept for the backward pass.
struct Trace {
  std::vector<Tensor> block_inputs;  // x_b, input of block b
  std::vector<Tensor> pre_activation;
  Tensor last;                       // output of the final block after pooling
  std::vector<double> features;
  std::vector<double> head_input;
  Logits logits{};
};

void conv3x3(const Tensor& in, std::span<const double> weight, std::span<const double> bias, Tensor& out) {
  const int h = in.height();
  const int w = in.width();
  const int cin = in.channels();
  for (int o = 0; o < out.channels(); ++o) {
    auto dst = out.plane(o);
    std::fill(dst.begin(), dst.end(), bias[static_cast<std::size_t>(o)]);
    for (int i = 0; i < cin; ++i) {
      auto src = in.plane(i);
      const double* k = weight.data() + (static_cast<std::size_t>(o) * static_cast<std::size_t>(cin) + static_cast<std::size_t>(i)) * 9;
      for (int ky = 0; ky < 3; ++ky) {
        const int y_lo = std::max(0, 1 - ky);
        const int y_hi = std::min(h, h + 1 - ky);
        for (int kx = 0; kx < 3; ++kx) {
          const double kv = k[ky * 3 + kx];
          const int x_lo = std::max(0, 1 - kx);
          const int x_hi = std::min(w, w + 1 - kx);
          for (int y = y_lo; y < y_hi; ++y) {
            double* drow = dst.data() + static_cast<std::size_t>(y) * static_cast<std::size_t>(w);
            const double* srow = src.data() + static_cast<std::size_t>(y + ky - 1) * static_cast<std::size_t>(w) + (kx - 1);
            for (int x = x_lo; x < x_hi; ++x) drow[x] += kv * srow[x];
          }
        }
      }
    }
  }
}

/// Gradients of conv3x3 w.r.t. weight, bias and (optionally) input.
void conv3x3_backward(const Tensor& in, std::span<const double> weight, const Tensor& dout, std::span<double> dweight,
                      std::span<double> dbias, Tensor* din) {
  const int h = in.height();
  const int w = in.width();
  const int cin = in.channels();
  for (int o = 0; o < dout.channels(); ++o) {
    auto g = dout.plane(o);
    double bsum = 0.0;
    for (double v : g) bsum += v;
    dbias[static_cast<std::size_t>(o)] += bsum;
    for (int i = 0; i < cin; ++i) {
      auto src = in.plane(i);
      const std::size_t kbase = (static_cast<std::size_t>(o) * static_cast<std::size_t>(cin) + static_cast<std::size_t>(i)) * 9;
      for (int ky = 0; ky < 3; ++ky) {
        const int y_lo = std::max(0, 1 - ky);
        const int y_hi = std::min(h, h + 1 - ky);
        for (int kx = 0; kx < 3; ++kx) {
          const int x_lo = std::max(0, 1 - kx);
          const int x_hi = std::min(w, w + 1 - kx);
          const double kv = weight[kbase + static_cast<std::size_t>(ky * 3 + kx)];
          double acc = 0.0;
          for (int y = y_lo; y < y_hi; ++y) {
            const double* grow = g.data() + static_cast<std::size_t>(y) * static_cast<std::size_t>(w);
            const double* srow = src.data() + static_cast<std::size_t>(y + ky - 1) * static_cast<std::size_t>(w) + (kx - 1);
            for (int x = x_lo; x < x_hi; ++x) acc += grow[x] * srow[x];
          }
          dweight[kbase + static_cast<std::size_t>(ky * 3 + kx)] += acc;
          if (din != nullptr) {
            auto dsrc = din->plane(i);
            for (int y = y_lo; y < y_hi; ++y) {
              const double* grow = g.data() + static_cast<std::size_t>(y) * static_cast<std::size_t>(w);
              double* drow = dsrc.data() + static_cast<std::size_t>(y + ky - 1) * static_cast<std::size_t>(w) + (kx - 1);
              for (int x = x_lo; x < x_hi; ++x) drow[x] += kv * grow[x];
            }
          }
        }
      }
    }
  }
}

Tensor relu_pool2(const Tensor& pre) {
  const int oh = pre.height() / 2;
  const int ow = pre.width() / 2;
  if (oh == 0 || ow == 0) {
    throw Error(ErrorKind::DimensionMismatch, "feature map too small for another 2x downsample");
  }
  Tensor out(pre.channels(), oh, ow);
  for (int c = 0; c < pre.channels(); ++c) {
    for (int y = 0; y < oh; ++y) {
      for (int x = 0; x < ow; ++x) {
        const double s = std::max(pre.at(c, 2 * y, 2 * x), 0.0) + std::max(pre.at(c, 2 * y, 2 * x + 1), 0.0) +
                         std::max(pre.at(c, 2 * y + 1, 2 * x), 0.0) + std::max(pre.at(c, 2 * y + 1, 2 * x + 1), 0.0);
        out.at(c, y, x) = 0.25 * s;
      }
    }
  }
  return out;
}

/// Gradient through 2×2 mean pooling and ReLU back to the pre-activation.
Tensor relu_pool2_backward(const Tensor& pre, const Tensor& dout) {
  Tensor dpre(pre.channels(), pre.height(), pre.width());
  for (int c = 0; c < pre.channels(); ++c) {
    for (int y = 0; y < dout.height(); ++y) {
      for (int x = 0; x < dout.width(); ++x) {
        const double g = 0.25 * dout.at(c, y, x);
        for (int dy = 0; dy < 2; ++dy) {
          for (int dx = 0; dx < 2; ++dx) {
            if (pre.at(c, 2 * y + dy, 2 * x + dx) > 0.0) dpre.at(c, 2 * y + dy, 2 * x + dx) = g;
          }
        }
      }
    }
  }
  return dpre;
}

Trace run_forward(const Model& model, const Tensor& planes, double vcdr) {
  if (planes.channels() != model.config().in_channels) {
    throw Error(ErrorKind::ChannelCountMismatch, "model expects " + std::to_string(model.config().in_channels) +
                                                     " channels, input has " + std::to_string(planes.channels()));
  }
  Trace t;
  Tensor x = average_pool(planes, model.config().input_pool);
  for (std::size_t b = 0; b < model.block_count(); ++b) {
    Tensor pre(model.block_out(b), x.height(), x.width());
    conv3x3(x, model.conv_weight(b), model.conv_bias(b), pre);
    Tensor next = relu_pool2(pre);
    t.block_inputs.push_back(std::move(x));
    t.pre_activation.push_back(std::move(pre));
    x = std::move(next);
  }
  const int d = model.feature_dim();
  t.features.assign(static_cast<std::size_t>(d), 0.0);
  const double inv = 1.0 / static_cast<double>(x.plane_size());
  for (int c = 0; c < d; ++c) {
    double s = 0.0;
    for (double v : x.plane(c)) s += v;
    t.features[static_cast<std::size_t>(c)] = s * inv;
  }
  t.last = std::move(x);
  t.head_input = model.use_vcdr() ? fuse(t.features, vcdr) : t.features;

  const auto w = model.head_weight();
  const auto bias = model.head_bias();
  const std::size_t hw = t.head_input.size();
  for (std::size_t k = 0; k < 2; ++k) {
    double s = bias[k];
    for (std::size_t j = 0; j < hw; ++j) s += w[k * hw + j] * t.head_input[j];
    t.logits[k] = s;
  }
  return t;
}

double cross_entropy(const Logits& logits, Label label) {
  const double m = std::max(logits[0], logits[1]);
  const double lse = m + std::log(std::exp(logits[0] - m) + std::exp(logits[1] - m));
  return lse - logits[static_cast<std::size_t>(label)];
}

void check_batch(std::span<const ModelInput> inputs, std::span<const Label> labels) {
  if (inputs.size() != labels.size()) throw Error(ErrorKind::DimensionMismatch, "inputs and labels differ in length");
  if (inputs.empty()) throw Error(ErrorKind::EmptySplit, "empty batch");
}

}  // namespace

std::vector<double> extract_features(const Model& model, const Tensor& planes) {
  return run_forward(model, planes, 0.0).features;
}

Logits forward(const Model& model, const Tensor& planes, double vcdr) { return run_forward(model, planes, vcdr).logits; }

Logits forward(const Model& model, const ModelInput& input) { return forward(model, input.planes, input.vcdr.value); }

double batch_loss(const Model& model, std::span<const ModelInput> inputs, std::span<const Label> labels) {
  check_batch(inputs, labels);
  double total = 0.0;
  for (std::size_t n = 0; n < inputs.size(); ++n) total += cross_entropy(forward(model, inputs[n]), labels[n]);
  return total / static_cast<double>(inputs.size());
}

Gradients backward(const Model& model, std::span<const ModelInput> inputs, std::span<const Label> labels) {
  check_batch(inputs, labels);
  Gradients g;
  g.values.assign(model.params().size(), 0.0);
  std::span<double> grad(g.values);
  const double scale = 1.0 / static_cast<double>(inputs.size());
  const int d = model.feature_dim();
  const auto hw = static_cast<std::size_t>(model.head_width());

  for (std::size_t n = 0; n < inputs.size(); ++n) {
    const double vcdr = inputs[n].vcdr.value;
    Trace t = run_forward(model, inputs[n].planes, vcdr);
    g.loss += cross_entropy(t.logits, labels[n]) * scale;

    const Logits p = softmax(t.logits);
    Logits dlogit{p[0] * scale, p[1] * scale};
    dlogit[static_cast<std::size_t>(labels[n])] -= scale;

    const auto w = model.head_weight();
    std::vector<double> dhead(hw, 0.0);
    for (std::size_t k = 0; k < 2; ++k) {
      grad[model.head_bias_offset() + k] += dlogit[k];
      for (std::size_t j = 0; j < hw; ++j) {
        grad[model.head_weight_offset() + k * hw + j] += dlogit[k] * t.head_input[j];
        dhead[j] += dlogit[k] * w[k * hw + j];
      }
    }
    std::vector<double> dfeat(dhead.begin(), dhead.begin() + d);
    if (model.use_vcdr()) {
      for (int c = 0; c < d; ++c) dfeat[static_cast<std::size_t>(c)] += vcdr * dhead[static_cast<std::size_t>(d + c)];
    }

    Tensor dx(t.last.channels(), t.last.height(), t.last.width());
    const double inv = 1.0 / static_cast<double>(t.last.plane_size());
    for (int c = 0; c < d; ++c) {
      auto plane = dx.plane(c);
      std::fill(plane.begin(), plane.end(), dfeat[static_cast<std::size_t>(c)] * inv);
    }

    for (std::size_t b = model.block_count(); b-- > 0;) {
      const Tensor dpre = relu_pool2_backward(t.pre_activation[b], dx);
      const Tensor& xin = t.block_inputs[b];
      Tensor din(xin.channels(), xin.height(), xin.width());
      const std::size_t nw = static_cast<std::size_t>(model.block_out(b) * model.block_in(b) * 9);
      conv3x3_backward(xin, model.conv_weight(b), dpre, grad.subspan(model.conv_weight_offset(b), nw),
                       grad.subspan(model.conv_bias_offset(b), static_cast<std::size_t>(model.block_out(b))),
                       b > 0 ? &din : nullptr);
      dx = std::move(din);
    }
  }
  if (!std::isfinite(g.loss)) throw Error(ErrorKind::NumericFailure, "non-finite loss");
  return g;
}

}  // namespace glaucofuse
