#include "glaucofuse/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>
#include <spdlog/spdlog.h>

#include "glaucofuse/error.hpp"

namespace fs = std::filesystem;

namespace glaucofuse {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::string quote_csv(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string malformed(std::size_t line, const std::string& why) {
  return "line " + std::to_string(line) + ": " + why;
}

}  // namespace

fs::path Manifest::resolve(const std::string& path) const {
  const fs::path p(path);
  return p.is_absolute() ? p : base_dir / p;
}

std::vector<ManifestRow> Manifest::rows_in(Split split) const {
  std::vector<ManifestRow> out;
  std::copy_if(rows.begin(), rows.end(), std::back_inserter(out), [&](const auto& r) { return r.split == split; });
  return out;
}

std::map<std::pair<Split, Label>, std::size_t> Manifest::counts() const {
  std::map<std::pair<Split, Label>, std::size_t> out;
  for (const auto& r : rows) ++out[{r.split, r.label}];
  return out;
}

Manifest parse_manifest(const std::string& text, const fs::path& base_dir) {
  Manifest m;
  m.base_dir = base_dir;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header_seen) {
      if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
      if (line != "image,mask,label,split") {
        throw Error(ErrorKind::MalformedRow, malformed(line_no, "expected header 'image,mask,label,split'"));
      }
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 4) {
      throw Error(ErrorKind::MalformedRow, malformed(line_no, "expected 4 fields, got " + std::to_string(fields.size())));
    }
    if (fields[0].empty() || fields[1].empty()) throw Error(ErrorKind::MalformedRow, malformed(line_no, "empty path"));
    ManifestRow row;
    row.image = fields[0];
    row.mask = fields[1];
    row.line = line_no;
    try {
      row.label = parse_label(fields[2]);
      row.split = parse_split(fields[3]);
    } catch (const Error& e) {
      throw Error(e.kind(), malformed(line_no, "'" + (e.kind() == ErrorKind::UnknownLabel ? fields[2] : fields[3]) + "'"));
    }
    m.rows.push_back(std::move(row));
  }
  if (!header_seen) throw Error(ErrorKind::MalformedRow, malformed(1, "missing header"));
  return m;
}

Manifest load_manifest(const fs::path& path, PathCheck check) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::MissingFile, path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  Manifest m = parse_manifest(ss.str(), path.parent_path());
  if (check == PathCheck::Require) {
    for (const auto& r : m.rows) {
      for (const auto* p : {&r.image, &r.mask}) {
        if (!fs::exists(m.resolve(*p))) {
          throw Error(ErrorKind::MissingFile, malformed(r.line, m.resolve(*p).string()));
        }
      }
    }
  }
  for (const auto& [key, n] : m.counts()) {
    spdlog::info("manifest {}: {} {} = {}", path.filename().string(), to_string(key.first), to_string(key.second), n);
  }
  return m;
}

std::string serialize_manifest(const Manifest& manifest) {
  std::string out = "image,mask,label,split\n";
  for (const auto& r : manifest.rows) {
    out += quote_csv(r.image) + ',' + quote_csv(r.mask) + ',' + to_string(r.label) + ',' + to_string(r.split) + '\n';
  }
  return out;
}

void write_manifest(const Manifest& manifest, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << serialize_manifest(manifest);
}

cv::Mat read_rgb(const fs::path& path) {
  cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (bgr.empty()) throw Error(ErrorKind::Io, "cannot read image " + path.string());
  cv::Mat rgb;
  cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
  return rgb;
}

void write_rgb(const fs::path& path, const cv::Mat& rgb) {
  cv::Mat bgr;
  cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);
  if (!cv::imwrite(path.string(), bgr)) throw Error(ErrorKind::Io, "cannot write " + path.string());
}

cv::Mat read_gray(const fs::path& path) {
  cv::Mat gray = cv::imread(path.string(), cv::IMREAD_GRAYSCALE);
  if (gray.empty()) throw Error(ErrorKind::Io, "cannot read mask " + path.string());
  return gray;
}

void write_gray(const fs::path& path, const cv::Mat& gray) {
  if (!cv::imwrite(path.string(), gray)) throw Error(ErrorKind::Io, "cannot write " + path.string());
}

cv::Rect roi_window(const TriMask& mask, int size, double margin) {
  int x0 = mask.width(), x1 = -1, y0 = mask.height(), y1 = -1;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!in_disc(mask.at(x, y))) continue;
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (x1 < 0) throw Error(ErrorKind::EmptyDisc, "mask has no rim or cup pixels");
  const int longest = std::max(x1 - x0 + 1, y1 - y0 + 1);
  int side = std::max(static_cast<int>(std::ceil(longest * margin)), size);
  side = std::min({side, mask.width(), mask.height()});
  const double cx = (x0 + x1 + 1) / 2.0;
  const double cy = (y0 + y1 + 1) / 2.0;
  const int left = std::clamp(static_cast<int>(std::lround(cx - side / 2.0)), 0, mask.width() - side);
  const int top = std::clamp(static_cast<int>(std::lround(cy - side / 2.0)), 0, mask.height() - side);
  return {left, top, side, side};
}

Roi crop_roi(const cv::Mat& rgb, const TriMask& mask, int size, double margin) {
  if (rgb.empty()) throw Error(ErrorKind::EmptyImage, "image is empty");
  if (rgb.cols != mask.width() || rgb.rows != mask.height()) {
    throw Error(ErrorKind::DimensionMismatch, "image and mask dimensions differ");
  }
  const cv::Rect window = roi_window(mask, size, margin);

  cv::Mat1b codes(mask.height(), mask.width());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) codes(y, x) = static_cast<std::uint8_t>(mask.at(x, y));
  }
  cv::Mat rgb_roi;
  cv::Mat1b code_roi;
  if (window.width == size) {
    rgb_roi = rgb(window).clone();
    code_roi = codes(window).clone();
  } else {
    cv::resize(rgb(window), rgb_roi, cv::Size(size, size), 0, 0, cv::INTER_LINEAR);
    cv::resize(codes(window), code_roi, cv::Size(size, size), 0, 0, cv::INTER_NEAREST);
  }
  std::vector<Region> labels;
  labels.reserve(static_cast<std::size_t>(size) * static_cast<std::size_t>(size));
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) labels.push_back(static_cast<Region>(code_roi(y, x)));
  }
  return {rgb_roi, TriMask(size, size, std::move(labels)), window};
}

}  // namespace glaucofuse
