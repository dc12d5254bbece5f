#include "glaucofuse/tensor.hpp"

#include <algorithm>

#include "glaucofuse/error.hpp"

namespace glaucofuse {

Tensor::Tensor(int channels, int height, int width, double fill)
    : channels_(channels), height_(height), width_(width) {
  if (channels < 0 || height < 0 || width < 0) {
    throw Error(ErrorKind::DimensionMismatch, "negative tensor dimension");
  }
  data_.assign(static_cast<std::size_t>(channels) * plane_size(), fill);
}

Tensor flip_horizontal(const Tensor& t) {
  Tensor out(t.channels(), t.height(), t.width());
  for (int c = 0; c < t.channels(); ++c) {
    for (int y = 0; y < t.height(); ++y) {
      for (int x = 0; x < t.width(); ++x) out.at(c, y, t.width() - 1 - x) = t.at(c, y, x);
    }
  }
  return out;
}

Tensor average_pool(const Tensor& t, int factor) {
  if (factor < 1) throw Error(ErrorKind::InvalidConfig, "pool factor must be >= 1");
  if (factor == 1) return t;
  const int oh = t.height() / factor;
  const int ow = t.width() / factor;
  Tensor out(t.channels(), oh, ow);
  const double scale = 1.0 / static_cast<double>(factor * factor);
  for (int c = 0; c < t.channels(); ++c) {
    for (int y = 0; y < oh; ++y) {
      for (int x = 0; x < ow; ++x) {
        double s = 0.0;
        for (int dy = 0; dy < factor; ++dy) {
          for (int dx = 0; dx < factor; ++dx) s += t.at(c, y * factor + dy, x * factor + dx);
        }
        out.at(c, y, x) = s * scale;
      }
    }
  }
  return out;
}

}  // namespace glaucofuse
