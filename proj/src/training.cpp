#include "glaucofuse/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "glaucofuse/error.hpp"
#include "glaucofuse/metrics.hpp"

namespace glaucofuse {

namespace {

void require_nonempty(const SampleSet& set, const char* name) {
  if (set.size() == 0) throw Error(ErrorKind::EmptySplit, std::string(name) + " split is empty");
}

double validation_auc(const Model& model, const SampleSet& val) {
  const auto scores = predict(model, val);
  std::vector<ScoredSample> scored;
  scored.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) scored.push_back({scores[i], val.labels[i]});
  return roc_auc(scored).auc;
}

}  // namespace

Model initial_model(const BackboneConfig& backbone, bool use_vcdr, std::uint64_t seed) {
  Model model(backbone, use_vcdr);
  Rng rng(seed);
  model.initialize(rng);
  return model;
}

std::vector<double> predict(const Model& model, const SampleSet& set) {
  std::vector<double> out;
  out.reserve(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) out.push_back(glaucoma_probability(forward(model, set.input(i))));
  return out;
}

TrainResult train(const BackboneConfig& backbone, bool use_vcdr, const SampleSet& train_set,
                  const SampleSet& val_set, const TrainConfig& config) {
  require_nonempty(train_set, "train");
  require_nonempty(val_set, "validation");
  if (config.epochs < 1) throw Error(ErrorKind::InvalidConfig, "epochs must be >= 1");
  if (config.batch_size < 1) throw Error(ErrorKind::InvalidConfig, "batch_size must be >= 1");

  Model model = initial_model(backbone, use_vcdr, config.seed);
  // Separate streams so that augmentation draws do not shift the shuffles.
  Rng shuffle_rng(config.seed ^ 0xa5a5a5a5a5a5a5a5ULL);
  Rng augment_rng(config.seed ^ 0x5a5a5a5a5a5a5a5aULL);

  std::vector<double> velocity(model.params().size(), 0.0);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result{model, {}, 0, -std::numeric_limits<double>::infinity()};
  const auto batch = static_cast<std::size_t>(config.batch_size);
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      std::vector<ModelInput> inputs;
      std::vector<Label> labels;
      inputs.reserve(end - start);
      for (std::size_t k = start; k < end; ++k) {
        inputs.push_back(augment(train_set.input(order[k]), augment_rng, config.augment));
        labels.push_back(train_set.labels[order[k]]);
      }
      const Gradients g = backward(model, inputs, labels);
      loss_sum += g.loss * static_cast<double>(end - start);
      auto params = model.params();
      for (std::size_t p = 0; p < params.size(); ++p) {
        velocity[p] = config.momentum * velocity[p] + g.values[p];
        params[p] -= config.learning_rate * velocity[p];
      }
    }
    const double auc = validation_auc(model, val_set);
    result.log.push_back({epoch, loss_sum / static_cast<double>(order.size()), auc});
    if (auc > result.best_val_auc) {
      result.best_val_auc = auc;
      result.best_epoch = epoch;
      result.model = model;
    }
  }
  return result;
}

double LogisticVcdrModel::probability(double vcdr) const {
  const double z = slope * vcdr + intercept;
  return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

LogisticVcdrModel fit_logistic_vcdr(std::span<const std::pair<double, Label>> pairs, const LogisticConfig& config) {
  const auto pos = std::count_if(pairs.begin(), pairs.end(), [](const auto& p) { return p.second == Label::Glaucoma; });
  if (pos == 0 || pos == static_cast<std::ptrdiff_t>(pairs.size())) {
    throw Error(ErrorKind::SingleClassData, "logistic fit needs both classes");
  }
  LogisticVcdrModel m;
  const double n = static_cast<double>(pairs.size());
  for (int it = 0; it < config.iterations; ++it) {
    double g_slope = 0.0;
    double g_intercept = 0.0;
    for (const auto& [x, label] : pairs) {
      const double residual = (label == Label::Glaucoma ? 1.0 : 0.0) - m.probability(x);
      g_slope += residual * x;
      g_intercept += residual;
    }
    m.slope += config.learning_rate * g_slope / n;
    m.intercept += config.learning_rate * g_intercept / n;
  }
  if (!std::isfinite(m.slope) || !std::isfinite(m.intercept)) {
    throw Error(ErrorKind::NumericFailure, "logistic fit diverged");
  }
  return m;
}

}  // namespace glaucofuse
