#include <doctest.h>

#include <fstream>
#include <sstream>

#include "glaucofuse/checkpoint.hpp"
#include "glaucofuse/commands.hpp"
#include "glaucofuse/config.hpp"
#include "glaucofuse/error.hpp"
#include "oracles.hpp"

using namespace glaucofuse;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

RunConfig small_config(const fs::path& out) {
  RunConfig c;
  c.seed = 5;
  c.synth.n_samples = 40;
  c.train.epochs = 2;
  c.train.batch_size = 8;
  c.out = out;
  return c;
}

/// Synthesizes a small dataset once per process.
const fs::path& shared_dataset() {
  static const fs::path dir = [] {
    const auto d = testing::scratch_dir("commands_data");
    cmd_synth(small_config(d));
    return d;
  }();
  return dir;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::Usage;
}

}  // namespace

TEST_CASE("config parsing, defaults and round trip") {
  const auto c = parse_config(
      "# comment\n"
      "variant = fundus\n"
      "seed = 42\n"
      "milestones.t = 12.5\n"
      "model.block_widths = 4, 8\n"
      "mask.label_map = 0:background,1:rim,2:cup\n"
      "synth.overlap = true\n");
  CHECK(c.variant == Variant::Fundus);
  CHECK(c.seed == 42);
  CHECK(c.prep.t == 12.5);
  CHECK(c.backbone.feature_dim == 8);
  CHECK(c.backbone_for_variant().in_channels == 3);
  CHECK(c.synth.overlap);
  CHECK(c.train.epochs == RunConfig{}.train.epochs);
  const auto again = parse_config(format_config(c));
  CHECK(format_config(again) == format_config(c));

  CHECK(kind_of([] { parse_config("colour = red\n"); }) == ErrorKind::InvalidConfig);
  CHECK(kind_of([] { parse_config("variant = resnet\n"); }) == ErrorKind::InvalidConfig);
  CHECK(kind_of([] { validate(parse_config("milestones.t = 0\n")); }) == ErrorKind::NonPositiveT);
  CHECK(kind_of([] { validate(parse_config("augment.flip_probability = 1.5\n")); }) == ErrorKind::InvalidConfig);
  CHECK(exit_code_for(ErrorKind::InvalidConfig) == ExitCode::Usage);
  CHECK(exit_code_for(ErrorKind::EmptyDisc) == ExitCode::Data);
  CHECK(exit_code_for(ErrorKind::NumericFailure) == ExitCode::Numeric);
}

TEST_CASE("checkpoint round trip and corruption") {
  BackboneConfig b;
  b.block_widths = {3, 4};
  b.feature_dim = 4;
  Checkpoint ck;
  ck.variant = Variant::Proposed;
  ck.cnn = initial_model(b, true, 3);
  const auto bytes = serialize_checkpoint(ck);
  const auto back = deserialize_checkpoint(bytes);
  REQUIRE(back.cnn);
  CHECK(*back.cnn == *ck.cnn);
  CHECK(back.variant == Variant::Proposed);

  Checkpoint lg;
  lg.variant = Variant::VcdrLogistic;
  lg.logistic = LogisticVcdrModel{3.5, -1.25};
  CHECK(deserialize_checkpoint(serialize_checkpoint(lg)).logistic == lg.logistic);

  CHECK(kind_of([&] { deserialize_checkpoint(bytes.substr(0, bytes.size() - 3)); }) == ErrorKind::CheckpointMismatch);
  auto bad = bytes;
  bad[0] = 'X';
  CHECK(kind_of([&] { deserialize_checkpoint(bad); }) == ErrorKind::CheckpointMismatch);
}

TEST_CASE("prep writes four images and a stats row per sample") {
  const auto data = shared_dataset();
  const auto out = testing::scratch_dir("prep_out");
  auto m = load_manifest(data / "manifest.csv");
  m.rows.resize(10);
  write_manifest(m, data / "ten.csv");

  RunConfig c = small_config(out);
  c.manifest = data / "ten.csv";
  const auto s = cmd_prep(c);
  CHECK(s.processed == 10);
  CHECK(s.failed == 0);
  std::size_t pngs = 0;
  for (const auto& e : fs::directory_iterator(out / "samples")) pngs += e.path().extension() == ".png";
  CHECK(pngs == 40);
  const auto stats = lines(out / "stats.csv");
  REQUIRE(stats.size() == 11);
  CHECK(stats[0] == "id,back,rim,cup,t_v,vcdr");
}

TEST_CASE("prep handles a cup-less mask and isolates unreadable rows") {
  const auto data = shared_dataset();
  const auto out = testing::scratch_dir("prep_degenerate");
  auto m = load_manifest(data / "manifest.csv");
  m.rows.resize(3);

  auto gray = read_gray(m.resolve(m.rows[0].mask));
  gray.setTo(128, gray == 0);
  write_gray(data / "nocup.png", gray);
  m.rows[0].mask = "nocup.png";
  m.rows[1].image = "images/absent.png";
  write_manifest(m, data / "degenerate.csv");

  RunConfig c = small_config(out);
  c.manifest = data / "degenerate.csv";
  const auto s = cmd_prep(c);
  CHECK(s.processed == 2);
  CHECK(s.failed == 1);
  CHECK(s.without_cup == 1);
  const auto stats = lines(out / "stats.csv");
  REQUIRE(stats.size() == 3);
  CHECK(stats[1].find(",,") != std::string::npos);
  CHECK(stats[1].substr(stats[1].rfind(',') + 1) == "0");
  const auto errors = lines(out / "errors.csv");
  REQUIRE(errors.size() == 2);
  CHECK(errors[1].rfind("3,images/absent.png,", 0) == 0);
}

TEST_CASE("train and eval: dispatch, self-consistency, determinism") {
  const auto data = shared_dataset();
  const auto out = testing::scratch_dir("train_eval");
  RunConfig c = small_config(out / "proposed");
  c.manifest = data / "manifest.csv";
  const auto t = cmd_train(c);
  const auto ck = load_checkpoint(t.checkpoint);
  REQUIRE(ck.cnn);
  CHECK(ck.cnn->config().in_channels == 5);
  CHECK(ck.cnn->use_vcdr());
  CHECK(lines(t.log).size() == 3);

  const std::string ck_bytes = slurp(t.checkpoint);
  c.checkpoint = t.checkpoint;
  c.eval_split = Split::Val;
  const auto val = cmd_eval(c);
  const auto val_scores = lines(out / "proposed" / "scores_val.csv");
  std::vector<ScoredSample> scored;
  for (std::size_t i = 1; i < val_scores.size(); ++i) {
    const auto& l = val_scores[i];
    const auto comma2 = l.rfind(',');
    const auto comma1 = l.rfind(',', comma2 - 1);
    scored.push_back({std::stod(l.substr(comma2 + 1)), parse_label(l.substr(comma1 + 1, comma2 - comma1 - 1))});
  }
  CHECK(val.threshold == select_threshold(scored));
  double best = 0.0;
  for (const auto& s : scored) {
    const auto ss = sens_spec(confusion(scored, s.score));
    if (ss.specificity > kMinSpecificity) best = std::max(best, f1_harmonic(ss.sensitivity, ss.specificity));
  }
  if (val.specificity > kMinSpecificity) CHECK(val.f1 == doctest::Approx(best).epsilon(1e-15));

  c.eval_split = Split::Test;
  cmd_eval(c);
  const auto report = slurp(out / "proposed" / "report_test.csv");
  cmd_eval(c);
  CHECK(slurp(out / "proposed" / "report_test.csv") == report);
  CHECK(slurp(t.checkpoint) == ck_bytes);

  RunConfig other = c;
  other.variant = Variant::Fundus;
  CHECK(kind_of([&] { cmd_eval(other); }) == ErrorKind::CheckpointMismatch);
  other = c;
  other.backbone.input_pool = 8;
  CHECK(kind_of([&] { cmd_eval(other); }) == ErrorKind::CheckpointMismatch);

  RunConfig fundus = small_config(out / "fundus");
  fundus.manifest = c.manifest;
  fundus.variant = Variant::Fundus;
  fundus.train.epochs = 1;
  const auto fck = load_checkpoint(cmd_train(fundus).checkpoint);
  REQUIRE(fck.cnn);
  CHECK(fck.cnn->config().in_channels == 3);
  CHECK(!fck.cnn->use_vcdr());

  RunConfig logistic = small_config(out / "logistic");
  logistic.manifest = c.manifest;
  logistic.variant = Variant::VcdrLogistic;
  const auto lck = load_checkpoint(cmd_train(logistic).checkpoint);
  CHECK(!lck.cnn);
  CHECK(lck.logistic);
}

TEST_CASE("eval on a single-class split fails") {
  const auto data = shared_dataset();
  const auto out = testing::scratch_dir("single_class");
  auto m = load_manifest(data / "manifest.csv");
  for (auto& r : m.rows) {
    if (r.split == Split::Test && r.label == Label::Glaucoma) r.split = Split::Val;
  }
  write_manifest(m, data / "single.csv");
  RunConfig c = small_config(out);
  c.manifest = data / "single.csv";
  c.variant = Variant::VcdrLogistic;
  c.checkpoint = cmd_train(c).checkpoint;
  CHECK(kind_of([&] { cmd_eval(c); }) == ErrorKind::SingleClassData);
}

TEST_CASE("roc and index subcommands") {
  const auto dir = testing::scratch_dir("roc_index");
  std::ofstream(dir / "scores.csv") << "id,label,score\na,normal,0.1\nb,normal,0.4\nc,glaucoma,0.35\nd,1,0.8\n";
  const auto curve = cmd_roc(dir / "scores.csv", dir / "roc");
  CHECK(curve.auc == 0.75);
  CHECK(lines(dir / "roc" / "roc_summary.csv")[1] == "4,0.75");

  const auto data = shared_dataset();
  std::ofstream(dir / "labels.csv") << "name,label,split\ns000000,glaucoma,train\ns000001.png,normal,test\n";
  const auto m = cmd_index(data / "images", data / "masks", dir / "labels.csv", dir / "index" / "manifest.csv");
  REQUIRE(m.rows.size() == 2);
  const auto loaded = load_manifest(dir / "index" / "manifest.csv");
  CHECK(loaded.rows == m.rows);
  CHECK(fs::exists(loaded.resolve(loaded.rows[1].image)));

  std::ofstream(dir / "bad.csv") << "name,label,split\nnope,normal,train\n";
  CHECK(kind_of([&] { cmd_index(data / "images", data / "masks", dir / "bad.csv", dir / "x.csv"); }) ==
        ErrorKind::MissingFile);
}
