#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <opencv2/core.hpp>

namespace glaucofuse {

/// Per-pixel segmentation label. The disc is Rim ∪ Cup and is never stored.
enum class Region : std::uint8_t { Background = 0, Rim = 1, Cup = 2 };

std::string to_string(Region region);
inline bool in_disc(Region r) { return r != Region::Background; }

/// Pixel coordinate; x is the column, y the row.
struct Pixel {
  int x = 0;
  int y = 0;
  friend auto operator<=>(const Pixel&, const Pixel&) = default;
};

/// Gray level -> region assignment used when reading mask files.
class LabelMap {
 public:
  LabelMap() = default;

  /// 0 -> Cup, 128 -> Rim, 255 -> Background.
  static LabelMap refuge();

  /// Parses "0:cup,128:rim,255:background".
  static LabelMap parse(const std::string& text);

  void set(std::uint8_t gray, Region region) { table_[gray] = region; }
  std::optional<Region> lookup(std::uint8_t gray) const { return table_[gray]; }

  /// Gray level written for a region; the lowest mapped level wins.
  std::uint8_t gray_for(Region region) const;

  std::string to_string() const;

 private:
  std::array<std::optional<Region>, 256> table_{};
};

class TriMask {
 public:
  TriMask(int width, int height, Region fill = Region::Background);
  TriMask(int width, int height, std::vector<Region> labels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return labels_.size(); }

  Region at(int x, int y) const { return labels_[index(x, y)]; }
  void set(int x, int y, Region r) { labels_[index(x, y)] = r; }

  std::span<const Region> labels() const noexcept { return labels_; }

  friend bool operator==(const TriMask&, const TriMask&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_;
  int height_;
  std::vector<Region> labels_;
};

/// Vertical cup-to-disc ratio.
struct Vcdr {
  double value = 0.0;
  friend auto operator<=>(const Vcdr&, const Vcdr&) = default;
};

TriMask parse_mask(const cv::Mat& gray, const LabelMap& encoding = LabelMap::refuge());

/// Gray rendering of a mask, one byte per pixel.
cv::Mat render_mask(const TriMask& mask, const LabelMap& encoding = LabelMap::refuge());

std::vector<Pixel> region_coords(const TriMask& mask, Region region);

/// Inclusive row span of pixels matching `pred`, 0 when none match.
template <typename Pred>
int vertical_extent(const TriMask& mask, Pred pred) {
  int lo = mask.height();
  int hi = -1;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (pred(mask.at(x, y))) {
        lo = std::min(lo, y);
        hi = std::max(hi, y);
        break;
      }
    }
  }
  return hi < 0 ? 0 : hi - lo + 1;
}

/// Cup row extent over disc row extent, both bounding extents (+1 inclusive).
Vcdr compute_vcdr(const TriMask& mask);

TriMask flip_horizontal(const TriMask& mask);

}  // namespace glaucofuse
