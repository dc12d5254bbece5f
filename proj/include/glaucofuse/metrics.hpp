#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "glaucofuse/labels.hpp"

namespace glaucofuse {

struct ScoredSample {
  double score = 0.0;  // glaucoma probability
  Label label = Label::Normal;
};

struct Confusion {
  std::size_t tp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;

  std::size_t total() const noexcept { return tp + fn + tn + fp; }
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

/// A sample is called glaucoma when score >= threshold.
Confusion confusion(std::span<const ScoredSample> samples, double threshold);

struct SensSpec {
  double sensitivity = 0.0;
  double specificity = 0.0;
};

SensSpec sens_spec(const Confusion& c);

/// Harmonic mean of sensitivity and specificity; 0 when both are 0.
double f1_harmonic(double sensitivity, double specificity);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

struct RocCurve {
  std::vector<RocPoint> points;  // (0,0) first, (1,1) last
  double auc = 0.0;
};

/// ROC swept over every distinct score, equal scores forming one step, and
/// its trapezoidal area.
RocCurve roc_auc(std::span<const ScoredSample> samples);

/// Operating threshold maximizing f1_harmonic with specificity > 0.8 over
/// {0, 1, midpoints of adjacent distinct scores}. Ties go to higher
/// specificity, then the lower threshold. When no candidate clears the
/// specificity bar the most specific candidate wins, ties by higher F1 then
/// lower threshold.
double select_threshold(std::span<const ScoredSample> validation);

inline constexpr double kMinSpecificity = 0.8;

struct EvalReport {
  double auc = 0.0;
  double threshold = 0.0;
  double sensitivity = 0.0;
  double specificity = 0.0;
  double f1 = 0.0;
  Confusion counts;
  std::vector<RocPoint> roc_points;
};

EvalReport evaluate(std::span<const ScoredSample> samples, double threshold);

}  // namespace glaucofuse
