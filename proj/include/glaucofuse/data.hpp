#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <opencv2/core.hpp>

#include "glaucofuse/labels.hpp"
#include "glaucofuse/mask_geometry.hpp"

namespace glaucofuse {

struct ManifestRow {
  std::string image;
  std::string mask;
  Label label = Label::Normal;
  Split split = Split::Train;
  std::size_t line = 0;  // 1-based line in the source file, 0 when built in memory

  friend bool operator==(const ManifestRow& a, const ManifestRow& b) {
    return a.image == b.image && a.mask == b.mask && a.label == b.label && a.split == b.split;
  }
};

/// Rows of `image,mask,label,split`; relative paths resolve against base_dir.
struct Manifest {
  std::filesystem::path base_dir;
  std::vector<ManifestRow> rows;

  std::filesystem::path resolve(const std::string& path) const;
  std::vector<ManifestRow> rows_in(Split split) const;
  std::map<std::pair<Split, Label>, std::size_t> counts() const;
};

enum class PathCheck { Require, Skip };

Manifest load_manifest(const std::filesystem::path& path, PathCheck check = PathCheck::Require);
Manifest parse_manifest(const std::string& text, const std::filesystem::path& base_dir);
std::string serialize_manifest(const Manifest& manifest);
void write_manifest(const Manifest& manifest, const std::filesystem::path& path);

/// Reads a color image into R, G, B channel order.
cv::Mat read_rgb(const std::filesystem::path& path);
void write_rgb(const std::filesystem::path& path, const cv::Mat& rgb);
cv::Mat read_gray(const std::filesystem::path& path);
void write_gray(const std::filesystem::path& path, const cv::Mat& gray);

struct Roi {
  cv::Mat rgb;
  TriMask mask;
  cv::Rect window;  // crop window in the source image
};

/// Square window centered on the disc bounding box, side
/// max(margin × longest disc side, size) clamped to the image, resampled to
/// size × size (bilinear for the image, nearest for the mask).
cv::Rect roi_window(const TriMask& mask, int size = 256, double margin = 2.0);
Roi crop_roi(const cv::Mat& rgb, const TriMask& mask, int size = 256, double margin = 2.0);

}  // namespace glaucofuse
