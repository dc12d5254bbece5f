#include "glaucofuse/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>
#include <vector>

#include "glaucofuse/error.hpp"

namespace glaucofuse {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw Error(ErrorKind::InvalidConfig, key + ": expected a number, got '" + v + "'");
  }
  return out;
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw Error(ErrorKind::InvalidConfig, key + ": expected an integer, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw Error(ErrorKind::InvalidConfig, key + ": expected true/false, got '" + v + "'");
}

std::vector<double> to_doubles(const std::string& key, const std::string& v, std::size_t n) {
  const auto items = split_list(v);
  if (items.size() != n) {
    throw Error(ErrorKind::InvalidConfig, key + ": expected " + std::to_string(n) + " comma-separated values");
  }
  std::vector<double> out;
  for (const auto& i : items) out.push_back(to_double(key, i));
  return out;
}

std::vector<int> to_ints(const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (const auto& i : split_list(v)) out.push_back(static_cast<int>(to_int(key, i)));
  return out;
}

RatioRange to_range(const std::string& key, const std::string& v) {
  const auto d = to_doubles(key, v, 2);
  return {d[0], d[1]};
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss << std::setprecision(17) << v;
  return ss.str();
}

template <typename T>
std::string join(const T& values) {
  std::string out;
  for (const auto& v : values) {
    if (!out.empty()) out += ',';
    if constexpr (std::is_floating_point_v<std::decay_t<decltype(v)>>) {
      out += fmt(v);
    } else {
      out += std::to_string(v);
    }
  }
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"variant", [](RunConfig& c, const auto&, const auto& v) { c.variant = parse_variant(v); }},
      {"seed", [](RunConfig& c, const auto& k, const auto& v) { c.seed = static_cast<std::uint64_t>(to_int(k, v)); }},
      {"epochs", [](RunConfig& c, const auto& k, const auto& v) { c.train.epochs = static_cast<int>(to_int(k, v)); }},
      {"learning_rate", [](RunConfig& c, const auto& k, const auto& v) { c.train.learning_rate = to_double(k, v); }},
      {"momentum", [](RunConfig& c, const auto& k, const auto& v) { c.train.momentum = to_double(k, v); }},
      {"batch_size", [](RunConfig& c, const auto& k, const auto& v) { c.train.batch_size = static_cast<int>(to_int(k, v)); }},
      {"augment.flip_probability",
       [](RunConfig& c, const auto& k, const auto& v) { c.train.augment.flip_probability = to_double(k, v); }},
      {"augment.blur_probability",
       [](RunConfig& c, const auto& k, const auto& v) { c.train.augment.blur_probability = to_double(k, v); }},
      {"augment.blur_sigma_min",
       [](RunConfig& c, const auto& k, const auto& v) { c.train.augment.blur_sigma_min = to_double(k, v); }},
      {"augment.blur_sigma_max",
       [](RunConfig& c, const auto& k, const auto& v) { c.train.augment.blur_sigma_max = to_double(k, v); }},
      {"normalize.mean",
       [](RunConfig& c, const auto& k, const auto& v) {
         const auto d = to_doubles(k, v, 5);
         for (std::size_t i = 0; i < 5; ++i) c.normalization.channels[i].mean = d[i];
       }},
      {"normalize.std",
       [](RunConfig& c, const auto& k, const auto& v) {
         const auto d = to_doubles(k, v, 5);
         for (std::size_t i = 0; i < 5; ++i) c.normalization.channels[i].std = d[i];
       }},
      {"normalize.mask_mean", [](RunConfig& c, const auto& k, const auto& v) { c.normalization.mask.mean = to_double(k, v); }},
      {"normalize.mask_std", [](RunConfig& c, const auto& k, const auto& v) { c.normalization.mask.std = to_double(k, v); }},
      {"milestones.strategy", [](RunConfig& c, const auto&, const auto& v) { c.prep.strategy = parse_milestone_strategy(v); }},
      {"milestones.t", [](RunConfig& c, const auto& k, const auto& v) { c.prep.t = to_double(k, v); }},
      {"vessel.polarity", [](RunConfig& c, const auto&, const auto& v) { c.prep.polarity = parse_vessel_polarity(v); }},
      {"mask.label_map", [](RunConfig& c, const auto&, const auto& v) { c.label_map = LabelMap::parse(v); }},
      {"roi.size", [](RunConfig& c, const auto& k, const auto& v) { c.prep.roi_size = static_cast<int>(to_int(k, v)); }},
      {"roi.margin", [](RunConfig& c, const auto& k, const auto& v) { c.prep.roi_margin = to_double(k, v); }},
      {"model.block_widths",
       [](RunConfig& c, const auto& k, const auto& v) {
         c.backbone.block_widths = to_ints(k, v);
         if (!c.backbone.block_widths.empty()) c.backbone.feature_dim = c.backbone.block_widths.back();
       }},
      {"model.feature_dim", [](RunConfig& c, const auto& k, const auto& v) { c.backbone.feature_dim = static_cast<int>(to_int(k, v)); }},
      {"model.input_pool", [](RunConfig& c, const auto& k, const auto& v) { c.backbone.input_pool = static_cast<int>(to_int(k, v)); }},
      {"logistic.iterations", [](RunConfig& c, const auto& k, const auto& v) { c.logistic.iterations = static_cast<int>(to_int(k, v)); }},
      {"logistic.learning_rate", [](RunConfig& c, const auto& k, const auto& v) { c.logistic.learning_rate = to_double(k, v); }},
      {"synth.n_samples", [](RunConfig& c, const auto& k, const auto& v) { c.synth.n_samples = static_cast<std::size_t>(to_int(k, v)); }},
      {"synth.overlap", [](RunConfig& c, const auto& k, const auto& v) { c.synth.overlap = to_bool(k, v); }},
      {"synth.glaucoma_fraction", [](RunConfig& c, const auto& k, const auto& v) { c.synth.glaucoma_fraction = to_double(k, v); }},
      {"synth.image_size", [](RunConfig& c, const auto& k, const auto& v) { c.synth.image_size = static_cast<int>(to_int(k, v)); }},
      {"synth.glaucoma_range", [](RunConfig& c, const auto& k, const auto& v) { c.synth.glaucoma = to_range(k, v); }},
      {"synth.normal_range", [](RunConfig& c, const auto& k, const auto& v) { c.synth.normal = to_range(k, v); }},
      {"synth.overlap_glaucoma_range", [](RunConfig& c, const auto& k, const auto& v) { c.synth.overlap_glaucoma = to_range(k, v); }},
      {"synth.overlap_normal_range", [](RunConfig& c, const auto& k, const auto& v) { c.synth.overlap_normal = to_range(k, v); }},
      {"synth.disc_radius",
       [](RunConfig& c, const auto& k, const auto& v) {
         const auto d = to_doubles(k, v, 2);
         c.synth.disc_radius_min = static_cast<int>(d[0]);
         c.synth.disc_radius_max = static_cast<int>(d[1]);
       }},
      {"synth.levels",
       [](RunConfig& c, const auto& k, const auto& v) {
         const auto d = to_doubles(k, v, 3);
         c.synth.back_level = static_cast<int>(d[0]);
         c.synth.rim_level = static_cast<int>(d[1]);
         c.synth.cup_level = static_cast<int>(d[2]);
       }},
      {"synth.level_jitter", [](RunConfig& c, const auto& k, const auto& v) { c.synth.level_jitter = static_cast<int>(to_int(k, v)); }},
      {"synth.vessel_count",
       [](RunConfig& c, const auto& k, const auto& v) {
         const auto d = to_doubles(k, v, 2);
         c.synth.vessel_count_min = static_cast<int>(d[0]);
         c.synth.vessel_count_max = static_cast<int>(d[1]);
       }},
      {"synth.vessel_width",
       [](RunConfig& c, const auto& k, const auto& v) {
         const auto d = to_doubles(k, v, 2);
         c.synth.vessel_width_min = static_cast<int>(d[0]);
         c.synth.vessel_width_max = static_cast<int>(d[1]);
       }},
      {"synth.vessel_depth", [](RunConfig& c, const auto& k, const auto& v) { c.synth.vessel_depth = static_cast<int>(to_int(k, v)); }},
      {"synth.noise_sigma", [](RunConfig& c, const auto& k, const auto& v) { c.synth.noise_sigma = to_double(k, v); }},
      {"paths.manifest", [](RunConfig& c, const auto&, const auto& v) { c.manifest = v; }},
      {"paths.out", [](RunConfig& c, const auto&, const auto& v) { c.out = v; }},
      {"paths.checkpoint", [](RunConfig& c, const auto&, const auto& v) { c.checkpoint = v; }},
      {"eval.split", [](RunConfig& c, const auto&, const auto& v) {
         try {
           c.eval_split = parse_split(v);
         } catch (const Error&) {
           throw Error(ErrorKind::InvalidConfig, "eval.split: unknown split '" + v + "'");
         }
       }},
  };
  return table;
}

}  // namespace

BackboneConfig RunConfig::backbone_for_variant() const {
  BackboneConfig b = backbone;
  b.in_channels = input_channels(variant) == 5 ? 5 : 3;
  return b;
}

RunConfig parse_config(const std::string& text, RunConfig base) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::InvalidConfig, "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      throw Error(ErrorKind::InvalidConfig, "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    it->second(base, key, value);
  }
  validate(base);
  return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidConfig, "cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

std::string format_config(const RunConfig& c) {
  std::vector<double> means, stds;
  for (const auto& n : c.normalization.channels) {
    means.push_back(n.mean);
    stds.push_back(n.std);
  }
  std::ostringstream o;
  o << "variant = " << to_string(c.variant) << '\n'
    << "seed = " << c.seed << '\n'
    << "epochs = " << c.train.epochs << '\n'
    << "learning_rate = " << fmt(c.train.learning_rate) << '\n'
    << "momentum = " << fmt(c.train.momentum) << '\n'
    << "batch_size = " << c.train.batch_size << '\n'
    << "augment.flip_probability = " << fmt(c.train.augment.flip_probability) << '\n'
    << "augment.blur_probability = " << fmt(c.train.augment.blur_probability) << '\n'
    << "augment.blur_sigma_min = " << fmt(c.train.augment.blur_sigma_min) << '\n'
    << "augment.blur_sigma_max = " << fmt(c.train.augment.blur_sigma_max) << '\n'
    << "normalize.mean = " << join(means) << '\n'
    << "normalize.std = " << join(stds) << '\n'
    << "normalize.mask_mean = " << fmt(c.normalization.mask.mean) << '\n'
    << "normalize.mask_std = " << fmt(c.normalization.mask.std) << '\n'
    << "milestones.strategy = " << to_string(c.prep.strategy) << '\n'
    << "milestones.t = " << fmt(c.prep.t) << '\n'
    << "vessel.polarity = " << to_string(c.prep.polarity) << '\n'
    << "mask.label_map = " << c.label_map.to_string() << '\n'
    << "roi.size = " << c.prep.roi_size << '\n'
    << "roi.margin = " << fmt(c.prep.roi_margin) << '\n'
    << "model.block_widths = " << join(c.backbone.block_widths) << '\n'
    << "model.feature_dim = " << c.backbone.feature_dim << '\n'
    << "model.input_pool = " << c.backbone.input_pool << '\n'
    << "logistic.iterations = " << c.logistic.iterations << '\n'
    << "logistic.learning_rate = " << fmt(c.logistic.learning_rate) << '\n'
    << "synth.n_samples = " << c.synth.n_samples << '\n'
    << "synth.overlap = " << (c.synth.overlap ? "true" : "false") << '\n'
    << "synth.glaucoma_fraction = " << fmt(c.synth.glaucoma_fraction) << '\n'
    << "synth.image_size = " << c.synth.image_size << '\n'
    << "synth.glaucoma_range = " << fmt(c.synth.glaucoma.min) << ',' << fmt(c.synth.glaucoma.max) << '\n'
    << "synth.normal_range = " << fmt(c.synth.normal.min) << ',' << fmt(c.synth.normal.max) << '\n'
    << "synth.overlap_glaucoma_range = " << fmt(c.synth.overlap_glaucoma.min) << ','
    << fmt(c.synth.overlap_glaucoma.max) << '\n'
    << "synth.overlap_normal_range = " << fmt(c.synth.overlap_normal.min) << ',' << fmt(c.synth.overlap_normal.max)
    << '\n'
    << "synth.disc_radius = " << c.synth.disc_radius_min << ',' << c.synth.disc_radius_max << '\n'
    << "synth.levels = " << c.synth.back_level << ',' << c.synth.rim_level << ',' << c.synth.cup_level << '\n'
    << "synth.level_jitter = " << c.synth.level_jitter << '\n'
    << "synth.vessel_count = " << c.synth.vessel_count_min << ',' << c.synth.vessel_count_max << '\n'
    << "synth.vessel_width = " << c.synth.vessel_width_min << ',' << c.synth.vessel_width_max << '\n'
    << "synth.vessel_depth = " << c.synth.vessel_depth << '\n'
    << "synth.noise_sigma = " << fmt(c.synth.noise_sigma) << '\n'
    << "eval.split = " << to_string(c.eval_split) << '\n';
  if (!c.manifest.empty()) o << "paths.manifest = " << c.manifest.string() << '\n';
  o << "paths.out = " << c.out.string() << '\n';
  if (!c.checkpoint.empty()) o << "paths.checkpoint = " << c.checkpoint.string() << '\n';
  return o.str();
}

void validate(const RunConfig& c) {
  auto fail = [](const std::string& why) { throw Error(ErrorKind::InvalidConfig, why); };
  if (!(c.prep.t > 0.0)) throw Error(ErrorKind::NonPositiveT, "milestones.t must be positive");
  for (double p : {c.train.augment.flip_probability, c.train.augment.blur_probability}) {
    if (!(p >= 0.0 && p <= 1.0)) fail("augmentation probabilities must lie in [0, 1]");
  }
  if (!(c.train.augment.blur_sigma_min > 0.0 && c.train.augment.blur_sigma_max >= c.train.augment.blur_sigma_min)) {
    fail("blur sigma range must satisfy 0 < min <= max");
  }
  for (const auto& n : c.normalization.channels) {
    if (!(n.std > 0.0)) fail("normalize.std entries must be positive");
  }
  if (!(c.normalization.mask.std > 0.0)) fail("normalize.mask_std must be positive");
  if (c.train.epochs < 1) fail("epochs must be >= 1");
  if (c.train.batch_size < 1) fail("batch_size must be >= 1");
  if (!(c.train.learning_rate >= 0.0)) fail("learning_rate must be >= 0");
  if (!(c.train.momentum >= 0.0 && c.train.momentum < 1.0)) fail("momentum must lie in [0, 1)");
  if (c.prep.roi_size < 8) fail("roi.size must be >= 8");
  if (!(c.prep.roi_margin >= 1.0)) fail("roi.margin must be >= 1");
  if (c.logistic.iterations < 0) fail("logistic.iterations must be >= 0");
  validate(c.backbone_for_variant());
  validate(c.synth);
}

}  // namespace glaucofuse
