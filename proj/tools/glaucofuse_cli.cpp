// glaucofuse: synthetic data, preprocessing, training and evaluation front end.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <opencv2/core.hpp>
#include <spdlog/spdlog.h>

#include "glaucofuse/commands.hpp"
#include "glaucofuse/config.hpp"
#include "glaucofuse/error.hpp"

namespace gf = glaucofuse;

namespace {

struct CommonFlags {
  std::string config;
  std::string manifest;
  std::string out;
  std::string variant;
  std::optional<std::uint64_t> seed;
  std::string split;
  std::string checkpoint;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "key = value configuration file");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--seed", f.seed, "random seed");
}

gf::RunConfig resolve(const CommonFlags& f) {
  gf::RunConfig c = f.config.empty() ? gf::RunConfig{} : gf::load_config(f.config);
  if (!f.manifest.empty()) c.manifest = f.manifest;
  if (!f.out.empty()) c.out = f.out;
  if (!f.variant.empty()) c.variant = gf::parse_variant(f.variant);
  if (f.seed) c.seed = *f.seed;
  if (!f.split.empty()) {
    try {
      c.eval_split = gf::parse_split(f.split);
    } catch (const gf::Error&) {
      throw gf::Error(gf::ErrorKind::Usage, "unknown split '" + f.split + "'");
    }
  }
  if (!f.checkpoint.empty()) c.checkpoint = f.checkpoint;
  gf::validate(c);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Glaucoma screening pipeline: VCDR, vessel and reduced channels, fusion classifier"};
  app.require_subcommand(1);
  CommonFlags flags;
  std::string scores;
  std::string images_dir, masks_dir, labels_csv;

  auto* synth = app.add_subcommand("synth", "generate a synthetic fundus dataset");
  add_common(synth, flags);

  auto* prep = app.add_subcommand("prep", "crop ROIs and dump vessel/reduced channels with region stats");
  add_common(prep, flags);
  prep->add_option("--manifest", flags.manifest, "dataset manifest CSV");

  auto* train = app.add_subcommand("train", "train one variant and save the best-validation checkpoint");
  add_common(train, flags);
  train->add_option("--manifest", flags.manifest, "dataset manifest CSV");
  train->add_option("--variant", flags.variant, "proposed|fundus_vcdr|fundus|mask_vcdr|mask|vcdr_logistic");

  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on a split");
  add_common(eval, flags);
  eval->add_option("--manifest", flags.manifest, "dataset manifest CSV");
  eval->add_option("--variant", flags.variant, "variant the checkpoint was trained as");
  eval->add_option("--split", flags.split, "train|val|test");
  eval->add_option("--checkpoint", flags.checkpoint, "checkpoint file");

  auto* roc = app.add_subcommand("roc", "ROC curve and AUC of a scores CSV");
  add_common(roc, flags);
  roc->add_option("--scores", scores, "CSV with score and label columns")->required();

  auto* index = app.add_subcommand("index", "build a manifest from image and mask directories");
  add_common(index, flags);
  index->add_option("--images", images_dir, "image directory")->required();
  index->add_option("--masks", masks_dir, "mask directory")->required();
  index->add_option("--labels", labels_csv, "CSV with name,label,split")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(gf::ExitCode::Usage);
  }

  try {
    const gf::RunConfig config = resolve(flags);
    if (synth->parsed()) {
      const auto s = gf::cmd_synth(config);
      std::cout << "samples," << s.samples << "\nmanifest," << s.manifest.string() << '\n';
    } else if (prep->parsed()) {
      const auto s = gf::cmd_prep(config);
      std::cout << "processed," << s.processed << "\nfailed," << s.failed << "\nwithout_cup," << s.without_cup << '\n';
    } else if (train->parsed()) {
      const auto s = gf::cmd_train(config);
      std::cout << "checkpoint," << s.checkpoint.string() << "\nbest_epoch," << s.best_epoch << "\nbest_val_auc,"
                << s.best_val_auc << '\n';
    } else if (eval->parsed()) {
      const auto r = gf::cmd_eval(config);
      std::cout << "auc," << r.auc << "\nthreshold," << r.threshold << "\nsensitivity," << r.sensitivity
                << "\nspecificity," << r.specificity << "\nf1," << r.f1 << '\n';
    } else if (roc->parsed()) {
      const auto c = gf::cmd_roc(scores, config.out);
      std::cout << "auc," << c.auc << '\n';
    } else if (index->parsed()) {
      const auto m = gf::cmd_index(images_dir, masks_dir, labels_csv, config.out / "manifest.csv");
      std::cout << "rows," << m.rows.size() << '\n';
    }
  } catch (const gf::Error& e) {
    spdlog::error("{}", e.what());
    return static_cast<int>(gf::exit_code_for(e.kind()));
  } catch (const cv::Exception& e) {
    spdlog::error("opencv: {}", e.what());
    return static_cast<int>(gf::ExitCode::Data);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return static_cast<int>(gf::ExitCode::Data);
  }
  return 0;
}
