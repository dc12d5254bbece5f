#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace glaucofuse {

/// Dense channel-major (C, H, W) array of doubles.
class Tensor {
 public:
  Tensor() = default;
  Tensor(int channels, int height, int width, double fill = 0.0);

  int channels() const noexcept { return channels_; }
  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t plane_size() const noexcept {
    return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
  }
  std::size_t size() const noexcept { return data_.size(); }

  double& at(int c, int y, int x) { return data_[offset(c, y, x)]; }
  double at(int c, int y, int x) const { return data_[offset(c, y, x)]; }

  std::span<double> plane(int c) { return {data_.data() + plane_size() * static_cast<std::size_t>(c), plane_size()}; }
  std::span<const double> plane(int c) const {
    return {data_.data() + plane_size() * static_cast<std::size_t>(c), plane_size()};
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::size_t offset(int c, int y, int x) const {
    return (static_cast<std::size_t>(c) * static_cast<std::size_t>(height_) + static_cast<std::size_t>(y)) *
               static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int channels_ = 0;
  int height_ = 0;
  int width_ = 0;
  std::vector<double> data_;
};

/// Mirrors every channel left-right.
Tensor flip_horizontal(const Tensor& t);

/// Non-overlapping `factor`×`factor` mean pooling; trailing rows/columns that
/// do not fill a window are dropped.
Tensor average_pool(const Tensor& t, int factor);

}  // namespace glaucofuse
