#include "glaucofuse/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "glaucofuse/data_synth.hpp"
#include "glaucofuse/error.hpp"
#include "glaucofuse/training.hpp"

namespace fs = std::filesystem;

namespace glaucofuse {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  return out;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::MissingFile, path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) out.push_back(f);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

Manifest manifest_for(const RunConfig& config, PathCheck check) {
  if (config.manifest.empty()) throw Error(ErrorKind::Usage, "no manifest given (--manifest or paths.manifest)");
  return load_manifest(config.manifest, check);
}

std::string row_id(const ManifestRow& row) { return fs::path(row.image).stem().string(); }

PreparedSample prepare_row(const Manifest& manifest, const ManifestRow& row, const RunConfig& config) {
  const cv::Mat rgb = read_rgb(manifest.resolve(row.image));
  const TriMask mask = parse_mask(read_gray(manifest.resolve(row.mask)), config.label_map);
  PreparedSample s = prepare_sample(rgb, mask, config.prep);
  s.id = row_id(row);
  s.label = row.label;
  s.split = row.split;
  return s;
}

SampleSet sample_set(const std::vector<PreparedSample>& samples, const RunConfig& config) {
  SampleSet set;
  const Variant variant = config.variant;
  set.input = [&samples, variant, &config](std::size_t i) {
    return build_input(samples[i], variant, config.normalization, config.label_map);
  };
  for (const auto& s : samples) set.labels.push_back(s.label);
  return set;
}

std::vector<std::pair<double, Label>> vcdr_pairs(const std::vector<PreparedSample>& samples) {
  std::vector<std::pair<double, Label>> pairs;
  for (const auto& s : samples) pairs.emplace_back(s.vcdr.value, s.label);
  return pairs;
}

std::vector<ScoredSample> scored(const std::vector<double>& scores, const std::vector<PreparedSample>& samples) {
  std::vector<ScoredSample> out;
  for (std::size_t i = 0; i < scores.size(); ++i) out.push_back({scores[i], samples[i].label});
  return out;
}

double mean_log_loss(const LogisticVcdrModel& m, const std::vector<std::pair<double, Label>>& pairs) {
  double total = 0.0;
  for (const auto& [x, label] : pairs) {
    const double p = m.probability(x);
    total -= std::log(label == Label::Glaucoma ? p : 1.0 - p);
  }
  return total / static_cast<double>(pairs.size());
}

}  // namespace

SynthSummary cmd_synth(const RunConfig& config) {
  SynthConfig sc = config.synth;
  sc.seed = config.seed;
  const SynthDataset ds = generate(sc);
  write_synth(ds, config.out);
  spdlog::info("synth: wrote {} samples to {}", ds.samples.size(), config.out.string());
  return {ds.samples.size(), config.out / "manifest.csv"};
}

PrepSummary cmd_prep(const RunConfig& config) {
  const Manifest manifest = manifest_for(config, PathCheck::Skip);
  const fs::path sample_dir = config.out / "samples";
  fs::create_directories(sample_dir);
  auto stats = open_out(config.out / "stats.csv");
  auto errors = open_out(config.out / "errors.csv");
  stats << "id,back,rim,cup,t_v,vcdr\n";
  errors << "line,image,error\n";

  PrepSummary summary;
  for (const auto& row : manifest.rows) {
    try {
      const PreparedSample s = prepare_row(manifest, row, config);
      write_rgb(sample_dir / (s.id + "_roi.png"), s.rgb);
      write_gray(sample_dir / (s.id + "_mask.png"), render_mask(s.mask, config.label_map));
      write_gray(sample_dir / (s.id + "_vessel.png"), s.vessel);
      write_gray(sample_dir / (s.id + "_reduced.png"), s.reduced.values);
      if (!s.cup_mean) {
        ++summary.without_cup;
        spdlog::warn("prep: {} has no cup pixels; VCDR = 0 and cup milestones omitted", s.id);
      }
      stats << s.id << ',' << num(s.back_mean) << ',' << num(s.rim_mean) << ','
            << (s.cup_mean ? num(*s.cup_mean) : std::string()) << ',' << num(s.t_v) << ',' << num(s.vcdr.value)
            << '\n';
      ++summary.processed;
    } catch (const std::exception& e) {
      ++summary.failed;
      spdlog::error("prep: line {} ({}): {}", row.line, row.image, e.what());
      std::string msg = e.what();
      for (char& c : msg) {
        if (c == ',' || c == '\n') c = ' ';
      }
      errors << row.line << ',' << row.image << ',' << msg << '\n';
    }
  }
  spdlog::info("prep: {} processed, {} failed, {} without cup", summary.processed, summary.failed,
               summary.without_cup);
  return summary;
}

std::vector<PreparedSample> prepare_split(const Manifest& manifest, Split split, const RunConfig& config) {
  std::vector<PreparedSample> out;
  for (const auto& row : manifest.rows) {
    if (row.split != split) continue;
    try {
      out.push_back(prepare_row(manifest, row, config));
    } catch (const Error& e) {
      throw Error(e.kind(), "line " + std::to_string(row.line) + " (" + row.image + "): " + e.what());
    }
  }
  return out;
}

Checkpoint train_variant(const std::vector<PreparedSample>& train_samples,
                         const std::vector<PreparedSample>& val_samples, const RunConfig& config,
                         std::vector<EpochLog>* log) {
  if (train_samples.empty()) throw Error(ErrorKind::EmptySplit, "train split is empty");
  if (val_samples.empty()) throw Error(ErrorKind::EmptySplit, "validation split is empty");
  Checkpoint ck;
  ck.variant = config.variant;
  if (!is_cnn(config.variant)) {
    const auto pairs = vcdr_pairs(train_samples);
    const auto model = fit_logistic_vcdr(pairs, config.logistic);
    std::vector<double> val_scores;
    for (const auto& s : val_samples) val_scores.push_back(model.probability(s.vcdr.value));
    if (log != nullptr) {
      log->push_back({1, mean_log_loss(model, pairs), roc_auc(scored(val_scores, val_samples)).auc});
    }
    ck.logistic = model;
    return ck;
  }
  TrainConfig tc = config.train;
  tc.seed = config.seed;
  const SampleSet train_set = sample_set(train_samples, config);
  const SampleSet val_set = sample_set(val_samples, config);
  TrainResult result = train(config.backbone_for_variant(), uses_vcdr(config.variant), train_set, val_set, tc);
  if (log != nullptr) *log = result.log;
  ck.cnn = std::move(result.model);
  return ck;
}

std::vector<double> score_samples(const Checkpoint& checkpoint, const std::vector<PreparedSample>& samples,
                                  const RunConfig& config) {
  std::vector<double> scores;
  scores.reserve(samples.size());
  if (checkpoint.logistic) {
    for (const auto& s : samples) scores.push_back(checkpoint.logistic->probability(s.vcdr.value));
    return scores;
  }
  RunConfig c = config;
  c.variant = checkpoint.variant;
  return predict(*checkpoint.cnn, sample_set(samples, c));
}

TrainSummary cmd_train(const RunConfig& config) {
  const Manifest manifest = manifest_for(config, PathCheck::Require);
  const auto train_samples = prepare_split(manifest, Split::Train, config);
  const auto val_samples = prepare_split(manifest, Split::Val, config);
  spdlog::info("train: variant {} on {} train / {} val samples", to_string(config.variant), train_samples.size(),
               val_samples.size());

  std::vector<EpochLog> log;
  const Checkpoint ck = train_variant(train_samples, val_samples, config, &log);

  fs::create_directories(config.out);
  TrainSummary summary{config.out / "checkpoint.bin", config.out / "epoch_log.csv", 0, -1.0};
  save_checkpoint(summary.checkpoint, ck);
  auto out = open_out(summary.log);
  out << "epoch,train_loss,val_auc\n";
  for (const auto& e : log) {
    out << e.epoch << ',' << num(e.train_loss) << ',' << num(e.val_auc) << '\n';
    spdlog::info("epoch {}: loss {:.5f} val AUC {:.4f}", e.epoch, e.train_loss, e.val_auc);
    if (e.val_auc > summary.best_val_auc) {
      summary.best_val_auc = e.val_auc;
      summary.best_epoch = e.epoch;
    }
  }
  return summary;
}

EvalReport cmd_eval(const RunConfig& config) {
  if (config.checkpoint.empty()) throw Error(ErrorKind::Usage, "no checkpoint given (--checkpoint or paths.checkpoint)");
  const Checkpoint ck = load_checkpoint(config.checkpoint);
  if (ck.variant != config.variant) {
    throw Error(ErrorKind::CheckpointMismatch,
                "checkpoint holds " + to_string(ck.variant) + ", config asks for " + to_string(config.variant));
  }
  if (ck.cnn) {
    const BackboneConfig expected = config.backbone_for_variant();
    if (!(ck.cnn->config() == expected)) {
      throw Error(ErrorKind::CheckpointMismatch, "checkpoint backbone differs from the configured backbone");
    }
  }
  const Manifest manifest = manifest_for(config, PathCheck::Require);
  const auto val_samples = prepare_split(manifest, Split::Val, config);
  const auto val_scored = scored(score_samples(ck, val_samples, config), val_samples);
  const double threshold = select_threshold(val_scored);

  const auto samples = config.eval_split == Split::Val ? val_samples : prepare_split(manifest, config.eval_split, config);
  const auto scores = score_samples(ck, samples, config);
  const EvalReport report = evaluate(scored(scores, samples), threshold);

  fs::create_directories(config.out);
  const std::string split = to_string(config.eval_split);
  auto rep = open_out(config.out / ("report_" + split + ".csv"));
  rep << "variant,split,n,auc,threshold,sensitivity,specificity,f1,tp,fn,tn,fp\n"
      << to_string(ck.variant) << ',' << split << ',' << samples.size() << ',' << num(report.auc) << ','
      << num(report.threshold) << ',' << num(report.sensitivity) << ',' << num(report.specificity) << ','
      << num(report.f1) << ',' << report.counts.tp << ',' << report.counts.fn << ',' << report.counts.tn << ','
      << report.counts.fp << '\n';
  auto roc = open_out(config.out / ("roc_" + split + ".csv"));
  roc << "fpr,tpr\n";
  for (const auto& p : report.roc_points) roc << num(p.fpr) << ',' << num(p.tpr) << '\n';
  auto sc = open_out(config.out / ("scores_" + split + ".csv"));
  sc << "id,label,score\n";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    sc << samples[i].id << ',' << to_string(samples[i].label) << ',' << num(scores[i]) << '\n';
  }
  spdlog::info("eval {}: AUC {:.4f}, threshold {:.4f}, sens {:.4f}, spec {:.4f}, F1 {:.4f}", split, report.auc,
               report.threshold, report.sensitivity, report.specificity, report.f1);
  return report;
}

RocCurve cmd_roc(const fs::path& scores_csv, const fs::path& out_dir) {
  std::istringstream in(read_text(scores_csv));
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::MalformedRow, "line 1: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_fields(line);
  int score_col = -1;
  int label_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "score") score_col = static_cast<int>(i);
    if (header[i] == "label") label_col = static_cast<int>(i);
  }
  if (score_col < 0 || label_col < 0) throw Error(ErrorKind::MalformedRow, "line 1: need 'score' and 'label' columns");

  std::vector<ScoredSample> samples;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != header.size()) throw Error(ErrorKind::MalformedRow, "line " + std::to_string(line_no));
    ScoredSample s;
    const auto& lab = f[static_cast<std::size_t>(label_col)];
    if (lab == "1") {
      s.label = Label::Glaucoma;
    } else if (lab == "0") {
      s.label = Label::Normal;
    } else {
      s.label = parse_label(lab);
    }
    try {
      std::size_t used = 0;
      s.score = std::stod(f[static_cast<std::size_t>(score_col)], &used);
    } catch (const std::exception&) {
      throw Error(ErrorKind::MalformedRow, "line " + std::to_string(line_no) + ": bad score");
    }
    samples.push_back(s);
  }
  const RocCurve curve = roc_auc(samples);
  fs::create_directories(out_dir);
  auto roc = open_out(out_dir / "roc.csv");
  roc << "fpr,tpr\n";
  for (const auto& p : curve.points) roc << num(p.fpr) << ',' << num(p.tpr) << '\n';
  auto summary = open_out(out_dir / "roc_summary.csv");
  summary << "n,auc\n" << samples.size() << ',' << num(curve.auc) << '\n';
  spdlog::info("roc: {} samples, AUC {:.4f}", samples.size(), curve.auc);
  return curve;
}

Manifest cmd_index(const fs::path& images_dir, const fs::path& masks_dir, const fs::path& labels_csv,
                   const fs::path& out_manifest) {
  for (const auto& d : {images_dir, masks_dir}) {
    if (!fs::is_directory(d)) throw Error(ErrorKind::MissingFile, d.string());
  }
  auto by_stem = [](const fs::path& dir) {
    std::map<std::string, fs::path> out;
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.is_regular_file()) out[e.path().stem().string()] = e.path();
    }
    return out;
  };
  const auto images = by_stem(images_dir);
  const auto masks = by_stem(masks_dir);

  std::istringstream in(read_text(labels_csv));
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "name,label,split") throw Error(ErrorKind::MalformedRow, "line 1: expected header 'name,label,split'");

  Manifest m;
  m.base_dir = out_manifest.parent_path();
  const fs::path base = fs::absolute(m.base_dir.empty() ? fs::path(".") : m.base_dir);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 3) throw Error(ErrorKind::MalformedRow, "line " + std::to_string(line_no));
    const std::string stem = fs::path(f[0]).stem().string();
    const auto img = images.find(stem);
    const auto msk = masks.find(stem);
    if (img == images.end() || msk == masks.end()) {
      throw Error(ErrorKind::MissingFile, "line " + std::to_string(line_no) + ": no image/mask for '" + stem + "'");
    }
    ManifestRow row;
    row.image = fs::relative(fs::absolute(img->second), base).generic_string();
    row.mask = fs::relative(fs::absolute(msk->second), base).generic_string();
    row.label = parse_label(f[1]);
    row.split = parse_split(f[2]);
    row.line = line_no;
    m.rows.push_back(std::move(row));
  }
  if (out_manifest.has_parent_path()) fs::create_directories(out_manifest.parent_path());
  write_manifest(m, out_manifest);
  return m;
}

}  // namespace glaucofuse
