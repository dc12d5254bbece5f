#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "glaucofuse/channel_synthesis.hpp"
#include "glaucofuse/labels.hpp"
#include "glaucofuse/model.hpp"

namespace glaucofuse {

/// Lazily materialized inputs: input(i) builds sample i's un-augmented input.
struct SampleSet {
  std::function<ModelInput(std::size_t)> input;
  std::vector<Label> labels;

  std::size_t size() const noexcept { return labels.size(); }
};

struct TrainConfig {
  int epochs = 12;
  double learning_rate = 0.05;
  double momentum = 0.9;
  int batch_size = 16;
  std::uint64_t seed = 1;
  AugmentConfig augment;
};

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  double val_auc = 0.0;
};

struct TrainResult {
  Model model;  // snapshot with the best validation AUC
  std::vector<EpochLog> log;
  int best_epoch = 0;
  double best_val_auc = 0.0;
};

/// Model initialized from the seed exactly as train() starts.
Model initial_model(const BackboneConfig& backbone, bool use_vcdr, std::uint64_t seed);

/// Mini-batch SGD with momentum on mean cross-entropy, augmenting each
/// training draw, keeping the parameters with the highest validation AUC.
TrainResult train(const BackboneConfig& backbone, bool use_vcdr, const SampleSet& train_set,
                  const SampleSet& val_set, const TrainConfig& config);

/// Glaucoma probabilities for every sample of the set, no augmentation.
std::vector<double> predict(const Model& model, const SampleSet& set);

struct LogisticVcdrModel {
  double slope = 0.0;
  double intercept = 0.0;

  double probability(double vcdr) const;
  friend bool operator==(const LogisticVcdrModel&, const LogisticVcdrModel&) = default;
};

struct LogisticConfig {
  int iterations = 20000;
  double learning_rate = 2.0;
};

/// Gradient ascent on the mean log-likelihood of label ~ sigmoid(slope·vcdr + intercept).
LogisticVcdrModel fit_logistic_vcdr(std::span<const std::pair<double, Label>> pairs, const LogisticConfig& config = {});

}  // namespace glaucofuse
