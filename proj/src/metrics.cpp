#include "glaucofuse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "glaucofuse/error.hpp"

namespace glaucofuse {

namespace {

void require_finite_scores(std::span<const ScoredSample> samples) {
  for (const auto& s : samples) {
    if (!std::isfinite(s.score)) throw Error(ErrorKind::NumericFailure, "non-finite score");
  }
}

void require_both_classes(std::span<const ScoredSample> samples) {
  const auto pos = std::count_if(samples.begin(), samples.end(), [](const auto& s) { return s.label == Label::Glaucoma; });
  const auto neg = static_cast<std::ptrdiff_t>(samples.size()) - pos;
  if (pos == 0 || neg == 0) {
    throw Error(ErrorKind::SingleClassData, std::to_string(pos) + " glaucoma / " + std::to_string(neg) + " normal");
  }
}

}  // namespace

Confusion confusion(std::span<const ScoredSample> samples, double threshold) {
  Confusion c;
  for (const auto& s : samples) {
    const bool predicted = s.score >= threshold;
    if (s.label == Label::Glaucoma) {
      predicted ? ++c.tp : ++c.fn;
    } else {
      predicted ? ++c.fp : ++c.tn;
    }
  }
  return c;
}

SensSpec sens_spec(const Confusion& c) {
  if (c.tp + c.fn == 0) throw Error(ErrorKind::NoPositives, "TP + FN = 0");
  if (c.tn + c.fp == 0) throw Error(ErrorKind::NoNegatives, "TN + FP = 0");
  return {static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn),
          static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp)};
}

double f1_harmonic(double sensitivity, double specificity) {
  const double denom = sensitivity + specificity;
  if (denom == 0.0) return 0.0;
  return 2.0 * sensitivity * specificity / denom;
}

RocCurve roc_auc(std::span<const ScoredSample> samples) {
  require_finite_scores(samples);
  require_both_classes(samples);

  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return samples[a].score > samples[b].score; });

  double pos = 0.0;
  double neg = 0.0;
  for (const auto& s : samples) (s.label == Label::Glaucoma ? pos : neg) += 1.0;

  RocCurve curve;
  curve.points.push_back({0.0, 0.0});
  // Area accumulated in count units: each group adds fp_step * (tp_before + tp_after) / 2.
  double tp = 0.0;
  double fp = 0.0;
  double area2 = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double score = samples[order[i]].score;
    double gtp = 0.0;
    double gfp = 0.0;
    for (; i < order.size() && samples[order[i]].score == score; ++i) {
      (samples[order[i]].label == Label::Glaucoma ? gtp : gfp) += 1.0;
    }
    area2 += gfp * (2.0 * tp + gtp);
    tp += gtp;
    fp += gfp;
    curve.points.push_back({fp / neg, tp / pos});
  }
  curve.auc = area2 / (2.0 * pos * neg);
  return curve;
}

double select_threshold(std::span<const ScoredSample> validation) {
  require_finite_scores(validation);
  require_both_classes(validation);

  std::vector<double> scores;
  scores.reserve(validation.size());
  for (const auto& s : validation) scores.push_back(s.score);
  std::sort(scores.begin(), scores.end());
  scores.erase(std::unique(scores.begin(), scores.end()), scores.end());

  std::vector<double> candidates{0.0, 1.0};
  for (std::size_t i = 1; i < scores.size(); ++i) candidates.push_back(scores[i - 1] + (scores[i] - scores[i - 1]) / 2.0);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  struct Scored {
    double threshold;
    double f1;
    double spec;
  };
  std::vector<Scored> evaluated;
  evaluated.reserve(candidates.size());
  for (double t : candidates) {
    const auto ss = sens_spec(confusion(validation, t));
    evaluated.push_back({t, f1_harmonic(ss.sensitivity, ss.specificity), ss.specificity});
  }

  // Candidates are ascending, so a strict comparison keeps the lowest threshold on ties.
  const Scored* best = nullptr;
  for (const auto& e : evaluated) {
    if (!(e.spec > kMinSpecificity)) continue;
    if (best == nullptr || std::tie(e.f1, e.spec) > std::tie(best->f1, best->spec)) best = &e;
  }
  if (best != nullptr) return best->threshold;

  for (const auto& e : evaluated) {
    if (best == nullptr || std::tie(e.spec, e.f1) > std::tie(best->spec, best->f1)) best = &e;
  }
  return best->threshold;
}

EvalReport evaluate(std::span<const ScoredSample> samples, double threshold) {
  EvalReport r;
  const auto curve = roc_auc(samples);
  r.auc = curve.auc;
  r.roc_points = curve.points;
  r.threshold = threshold;
  r.counts = confusion(samples, threshold);
  const auto ss = sens_spec(r.counts);
  r.sensitivity = ss.sensitivity;
  r.specificity = ss.specificity;
  r.f1 = f1_harmonic(ss.sensitivity, ss.specificity);
  return r;
}

}  // namespace glaucofuse
