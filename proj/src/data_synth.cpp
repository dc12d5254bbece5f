#include "glaucofuse/data_synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include <opencv2/imgproc.hpp>

#include "glaucofuse/error.hpp"

namespace fs = std::filesystem;

namespace glaucofuse {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::mt19937_64 sample_stream(const SynthConfig& config, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0x5eedu};
  return std::mt19937_64(seq);
}

std::string sample_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "s%06zu", index);
  return buf;
}

const RatioRange& class_range(const SynthConfig& c, Label label) {
  if (label == Label::Glaucoma) return c.overlap ? c.overlap_glaucoma : c.glaucoma;
  return c.overlap ? c.overlap_normal : c.normal;
}

std::uint8_t saturate(int v) { return static_cast<std::uint8_t>(std::clamp(v, 0, 255)); }

}  // namespace

void validate(const SynthConfig& c) {
  auto fail = [](const std::string& why) { throw Error(ErrorKind::InvalidConfig, "synth: " + why); };
  if (c.n_samples == 0) fail("n_samples must be > 0");
  for (const auto* r : {&c.glaucoma, &c.normal, &c.overlap_glaucoma, &c.overlap_normal}) {
    if (!(r->min > 0.0 && r->min <= r->max && r->max <= 1.0)) fail("ratio ranges must lie within (0, 1]");
  }
  if (!(c.glaucoma_fraction >= 0.0 && c.glaucoma_fraction <= 1.0)) fail("glaucoma_fraction must be in [0, 1]");
  if (c.disc_radius_min < 2 || c.disc_radius_max < c.disc_radius_min) fail("bad disc radius range");
  if (c.image_size < 4 * c.disc_radius_max) fail("image_size must be at least 4x the largest disc radius");
  if (c.vessel_count_min < 0 || c.vessel_count_max < c.vessel_count_min) fail("bad vessel count range");
  if (c.vessel_width_min < 1 || c.vessel_width_max < c.vessel_width_min) fail("bad vessel width range");
  if (c.level_jitter < 0) fail("level_jitter must be >= 0");
  if (!(c.noise_sigma >= 0.0)) fail("noise_sigma must be >= 0");
  for (int level : {c.back_level, c.rim_level, c.cup_level}) {
    if (level - c.level_jitter < 0 || level + c.level_jitter > 255) fail("intensity levels must stay within [0, 255]");
  }
}

Label synth_label(const SynthConfig& config, std::size_t index) {
  auto rng = sample_stream(config, index);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return unit(rng) < config.glaucoma_fraction ? Label::Glaucoma : Label::Normal;
}

std::vector<Split> synth_splits(const SynthConfig& config) {
  std::vector<Split> splits(config.n_samples, Split::Train);
  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  for (Label label : {Label::Normal, Label::Glaucoma}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < config.n_samples; ++i) {
      if (synth_label(config, i) == label) idx.push_back(i);
    }
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto n = idx.size();
    const auto n_val = static_cast<std::size_t>(std::lround(0.15 * static_cast<double>(n)));
    const auto n_test = static_cast<std::size_t>(std::lround(0.15 * static_cast<double>(n)));
    for (std::size_t k = 0; k < n; ++k) {
      if (k < n_val) {
        splits[idx[k]] = Split::Val;
      } else if (k < n_val + n_test) {
        splits[idx[k]] = Split::Test;
      }
    }
  }
  return splits;
}

SynthSample generate_sample(const SynthConfig& config, std::size_t index) {
  auto rng = sample_stream(config, index);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  auto uniform_int = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

  SynthSample s;
  s.id = sample_id(index);
  s.label = unit(rng) < config.glaucoma_fraction ? Label::Glaucoma : Label::Normal;

  const RatioRange& range = class_range(config, s.label);
  s.vertical_ratio = uniform(range.min, range.max);
  s.horizontal_ratio = uniform(range.min, range.max);
  s.disc_semi_axis = uniform_int(config.disc_radius_min, config.disc_radius_max);
  const double disc_a = s.disc_semi_axis;
  const double disc_b = disc_a * uniform(0.92, 1.05);
  const double cup_a = s.vertical_ratio * disc_a;
  const double cup_b = s.horizontal_ratio * disc_b;

  const int size = config.image_size;
  const int reach = static_cast<int>(std::ceil(std::max(disc_a, disc_b)));
  const int cx = uniform_int(2 * reach, size - 1 - 2 * reach);
  const int cy = uniform_int(2 * reach, size - 1 - 2 * reach);

  s.back_level = config.back_level + uniform_int(-config.level_jitter, config.level_jitter);
  s.rim_level = config.rim_level + uniform_int(-config.level_jitter, config.level_jitter);
  s.cup_level = config.cup_level + uniform_int(-config.level_jitter, config.level_jitter);

  s.mask = TriMask(size, size);
  cv::Mat1s green(size, size);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double dx = x - cx;
      const double dy = y - cy;
      Region r = Region::Background;
      if ((dx * dx) / (disc_b * disc_b) + (dy * dy) / (disc_a * disc_a) <= 1.0) {
        r = (dx * dx) / (cup_b * cup_b) + (dy * dy) / (cup_a * cup_a) <= 1.0 ? Region::Cup : Region::Rim;
      }
      s.mask.set(x, y, r);
      green(y, x) = static_cast<short>(r == Region::Cup ? s.cup_level : r == Region::Rim ? s.rim_level : s.back_level);
    }
  }

  // Vessels: quadratic curves from inside the cup out past the disc edge.
  cv::Mat1b vessels(size, size, std::uint8_t{0});
  const int n_vessels = uniform_int(config.vessel_count_min, config.vessel_count_max);
  for (int v = 0; v < n_vessels; ++v) {
    const double angle = uniform(0.0, 2.0 * kPi);
    const double length = disc_a * uniform(1.5, 2.2);
    const double bend = uniform(-0.4, 0.4) * length;
    const cv::Point2d start(cx + uniform(-0.3, 0.3) * cup_b, cy + uniform(-0.3, 0.3) * cup_a);
    const cv::Point2d dir(std::cos(angle), std::sin(angle));
    const cv::Point2d normal(-dir.y, dir.x);
    const cv::Point2d end = start + dir * length;
    const cv::Point2d ctrl = start + dir * (0.5 * length) + normal * bend;
    std::vector<cv::Point> pts;
    for (int k = 0; k <= 32; ++k) {
      const double t = k / 32.0;
      const cv::Point2d p = start * ((1 - t) * (1 - t)) + ctrl * (2 * (1 - t) * t) + end * (t * t);
      pts.emplace_back(static_cast<int>(std::lround(p.x)), static_cast<int>(std::lround(p.y)));
    }
    const int width = uniform_int(config.vessel_width_min, config.vessel_width_max);
    cv::polylines(vessels, pts, false, cv::Scalar(255), width, cv::LINE_8);
  }

  cv::Mat noise;
  if (config.noise_sigma > 0.0) {
    noise = cv::Mat(size, size, CV_32FC3);
    cv::RNG cvrng(rng());
    cvrng.fill(noise, cv::RNG::NORMAL, cv::Scalar::all(0.0), cv::Scalar::all(config.noise_sigma));
  }

  s.rgb = cv::Mat(size, size, CV_8UC3);
  for (int y = 0; y < size; ++y) {
    auto* row = s.rgb.ptr<cv::Vec3b>(y);
    for (int x = 0; x < size; ++x) {
      int g = green(y, x);
      const bool vessel = vessels(y, x) != 0;
      if (vessel) g -= config.vessel_depth;
      std::array<double, 3> px{static_cast<double>(std::min(g + 85, 255)) - (vessel ? config.vessel_depth / 2 : 0),
                               static_cast<double>(g), static_cast<double>(g) / 3.0 + 10.0};
      if (!noise.empty()) {
        const auto& n = noise.at<cv::Vec3f>(y, x);
        for (int c = 0; c < 3; ++c) px[static_cast<std::size_t>(c)] += n[c];
      }
      for (int c = 0; c < 3; ++c) row[x][c] = saturate(static_cast<int>(std::lround(px[static_cast<std::size_t>(c)])));
    }
  }
  return s;
}

SynthDataset generate(const SynthConfig& config) {
  validate(config);
  const auto splits = synth_splits(config);
  SynthDataset ds;
  ds.samples.reserve(config.n_samples);
  for (std::size_t i = 0; i < config.n_samples; ++i) {
    SynthSample s = generate_sample(config, i);
    s.split = splits[i];
    ds.manifest.rows.push_back({"images/" + s.id + ".png", "masks/" + s.id + ".png", s.label, s.split, 0});
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

void write_synth(const SynthDataset& dataset, const fs::path& out_dir) {
  fs::create_directories(out_dir / "images");
  fs::create_directories(out_dir / "masks");
  for (const auto& s : dataset.samples) {
    write_rgb(out_dir / "images" / (s.id + ".png"), s.rgb);
    write_gray(out_dir / "masks" / (s.id + ".png"), render_mask(s.mask));
  }
  Manifest m = dataset.manifest;
  m.base_dir = out_dir;
  write_manifest(m, out_dir / "manifest.csv");
}

}  // namespace glaucofuse
