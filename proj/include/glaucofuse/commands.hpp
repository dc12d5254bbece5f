#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "glaucofuse/checkpoint.hpp"
#include "glaucofuse/config.hpp"
#include "glaucofuse/data.hpp"
#include "glaucofuse/metrics.hpp"
#include "glaucofuse/pipeline.hpp"

namespace glaucofuse {

/// Outputs of each subcommand land under RunConfig::out.

struct SynthSummary {
  std::size_t samples = 0;
  std::filesystem::path manifest;
};

/// Synthetic dataset: images/, masks/, manifest.csv.
SynthSummary cmd_synth(const RunConfig& config);

struct PrepSummary {
  std::size_t processed = 0;
  std::size_t failed = 0;
  std::size_t without_cup = 0;
};

/// Per row: samples/<id>_{roi,mask,vessel,reduced}.png and a stats.csv row
/// (id, back, rim, cup, t_v, vcdr). Failing rows go to errors.csv.
PrepSummary cmd_prep(const RunConfig& config);

struct TrainSummary {
  std::filesystem::path checkpoint;
  std::filesystem::path log;
  int best_epoch = 0;
  double best_val_auc = 0.0;
};

/// checkpoint.bin plus epoch_log.csv (epoch, train_loss, val_auc).
TrainSummary cmd_train(const RunConfig& config);

/// Threshold picked on the validation split, applied to config.eval_split.
/// Writes report_<split>.csv, roc_<split>.csv and scores_<split>.csv.
EvalReport cmd_eval(const RunConfig& config);

/// ROC of a scores CSV with `score` and `label` columns; writes roc.csv and
/// roc_summary.csv.
RocCurve cmd_roc(const std::filesystem::path& scores_csv, const std::filesystem::path& out_dir);

/// Builds a manifest from a directory of images, a directory of masks
/// matched by file stem, and a `name,label,split` CSV.
Manifest cmd_index(const std::filesystem::path& images_dir, const std::filesystem::path& masks_dir,
                   const std::filesystem::path& labels_csv, const std::filesystem::path& out_manifest);

/// Reads and prepares every row of one split; any failing row aborts.
std::vector<PreparedSample> prepare_split(const Manifest& manifest, Split split, const RunConfig& config);

/// Glaucoma scores of prepared samples under a checkpoint.
std::vector<double> score_samples(const Checkpoint& checkpoint, const std::vector<PreparedSample>& samples,
                                  const RunConfig& config);

/// Trains the configured variant on in-memory samples.
Checkpoint train_variant(const std::vector<PreparedSample>& train_samples,
                         const std::vector<PreparedSample>& val_samples, const RunConfig& config,
                         std::vector<EpochLog>* log = nullptr);

}  // namespace glaucofuse
