#include "glaucofuse/mask_geometry.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "glaucofuse/error.hpp"

namespace glaucofuse {

std::string to_string(Region region) {
  switch (region) {
    case Region::Background: return "background";
    case Region::Rim: return "rim";
    case Region::Cup: return "cup";
  }
  return "unknown";
}

LabelMap LabelMap::refuge() {
  LabelMap m;
  m.set(0, Region::Cup);
  m.set(128, Region::Rim);
  m.set(255, Region::Background);
  return m;
}

LabelMap LabelMap::parse(const std::string& text) {
  LabelMap m;
  std::stringstream ss(text);
  std::string item;
  bool any = false;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw Error(ErrorKind::InvalidConfig, "label map entry without ':' in '" + text + "'");
    }
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t") + 1);
      return s;
    };
    const std::string gray_text = trim(item.substr(0, colon));
    const std::string name = trim(item.substr(colon + 1));
    int gray = -1;
    try {
      std::size_t used = 0;
      gray = std::stoi(gray_text, &used);
      if (used != gray_text.size()) gray = -1;
    } catch (const std::exception&) {
      gray = -1;
    }
    if (gray < 0 || gray > 255) {
      throw Error(ErrorKind::InvalidConfig, "label map gray level out of range: '" + gray_text + "'");
    }
    Region r;
    if (name == "cup") {
      r = Region::Cup;
    } else if (name == "rim") {
      r = Region::Rim;
    } else if (name == "background") {
      r = Region::Background;
    } else {
      throw Error(ErrorKind::InvalidConfig, "unknown region name '" + name + "'");
    }
    m.set(static_cast<std::uint8_t>(gray), r);
    any = true;
  }
  if (!any) throw Error(ErrorKind::InvalidConfig, "empty label map");
  return m;
}

std::uint8_t LabelMap::gray_for(Region region) const {
  for (int g = 0; g < 256; ++g) {
    if (table_[g] == region) return static_cast<std::uint8_t>(g);
  }
  throw Error(ErrorKind::InvalidConfig, "label map has no gray level for " + glaucofuse::to_string(region));
}

std::string LabelMap::to_string() const {
  std::string out;
  for (int g = 0; g < 256; ++g) {
    if (!table_[g]) continue;
    if (!out.empty()) out += ',';
    out += std::to_string(g) + ':' + glaucofuse::to_string(*table_[g]);
  }
  return out;
}

TriMask::TriMask(int width, int height, Region fill)
    : TriMask(width, height,
              std::vector<Region>(static_cast<std::size_t>(std::max(width, 0)) *
                                      static_cast<std::size_t>(std::max(height, 0)),
                                  fill)) {}

TriMask::TriMask(int width, int height, std::vector<Region> labels)
    : width_(width), height_(height), labels_(std::move(labels)) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorKind::EmptyImage, "mask dimensions must be positive");
  }
  if (labels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(ErrorKind::DimensionMismatch, "label count does not match mask dimensions");
  }
}

TriMask parse_mask(const cv::Mat& gray, const LabelMap& encoding) {
  if (gray.empty()) throw Error(ErrorKind::EmptyImage, "mask image is empty");
  if (gray.type() != CV_8UC1) {
    throw Error(ErrorKind::ChannelCountMismatch, "mask must be single-channel 8-bit");
  }
  std::vector<Region> labels(gray.total());
  std::map<int, std::size_t> unknown;
  std::size_t i = 0;
  for (int y = 0; y < gray.rows; ++y) {
    const auto* row = gray.ptr<std::uint8_t>(y);
    for (int x = 0; x < gray.cols; ++x, ++i) {
      if (auto r = encoding.lookup(row[x])) {
        labels[i] = *r;
      } else {
        ++unknown[row[x]];
      }
    }
  }
  if (!unknown.empty()) {
    const auto& [level, count] = *unknown.begin();
    throw Error(ErrorKind::UnknownLabelValue,
                "gray level " + std::to_string(level) + " (" + std::to_string(count) + " pixels)");
  }
  return TriMask(gray.cols, gray.rows, std::move(labels));
}

cv::Mat render_mask(const TriMask& mask, const LabelMap& encoding) {
  const std::array<std::uint8_t, 3> levels{encoding.gray_for(Region::Background),
                                           encoding.gray_for(Region::Rim),
                                           encoding.gray_for(Region::Cup)};
  cv::Mat out(mask.height(), mask.width(), CV_8UC1);
  for (int y = 0; y < mask.height(); ++y) {
    auto* row = out.ptr<std::uint8_t>(y);
    for (int x = 0; x < mask.width(); ++x) row[x] = levels[static_cast<std::size_t>(mask.at(x, y))];
  }
  return out;
}

std::vector<Pixel> region_coords(const TriMask& mask, Region region) {
  std::vector<Pixel> out;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (mask.at(x, y) == region) out.push_back({x, y});
    }
  }
  return out;
}

Vcdr compute_vcdr(const TriMask& mask) {
  const int vdd = vertical_extent(mask, [](Region r) { return in_disc(r); });
  if (vdd == 0) throw Error(ErrorKind::EmptyDisc, "mask has no rim or cup pixels");
  const int vcd = vertical_extent(mask, [](Region r) { return r == Region::Cup; });
  return Vcdr{static_cast<double>(vcd) / static_cast<double>(vdd)};
}

TriMask flip_horizontal(const TriMask& mask) {
  TriMask out(mask.width(), mask.height());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) out.set(mask.width() - 1 - x, y, mask.at(x, y));
  }
  return out;
}

}  // namespace glaucofuse
