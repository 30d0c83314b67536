#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "uwimg/errors.hpp"

namespace uwimg {

/// Row-major, channel-interleaved grid of doubles. The tag parameter keeps
/// images, depth maps and transmission maps from being mixed up.
template <std::size_t Channels, class Tag>
class Raster {
 public:
  static constexpr std::size_t kChannels = Channels;

  Raster() = default;
  Raster(std::size_t height, std::size_t width, double fill = 0.0)
      : height_(height), width_(width), data_(height * width * Channels, fill) {
    if (height == 0 || width == 0) {
      throw DomainError("raster dimensions must be positive");
    }
  }

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t pixel_count() const noexcept { return height_ * width_; }
  bool empty() const noexcept { return data_.empty(); }

  double& at(std::size_t row, std::size_t col, std::size_t ch = 0) {
    return data_[(row * width_ + col) * Channels + ch];
  }
  double at(std::size_t row, std::size_t col, std::size_t ch = 0) const {
    return data_[(row * width_ + col) * Channels + ch];
  }

  std::span<double> values() & noexcept { return data_; }
  std::span<const double> values() const& noexcept { return data_; }
  // A span into a temporary would dangle (e.g. in a range-for).
  std::span<const double> values() const&& = delete;

  template <class OtherTag>
  bool same_shape(const Raster<Channels, OtherTag>& other) const noexcept {
    return height_ == other.height() && width_ == other.width();
  }

  bool operator==(const Raster&) const = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<double> data_;
};

struct ImageTag;
struct TransmissionTag;
struct DepthTag;
struct FieldTag;

/// RGB intensities in [0,1].
using ImagePlane = Raster<3, ImageTag>;
/// Per-pixel, per-channel transmission in (0,1].
using TransmissionMap = Raster<3, TransmissionTag>;
/// Object-camera distance in meters.
using DepthMap = Raster<1, DepthTag>;
/// Generic single-channel scalar field.
using Field = Raster<1, FieldTag>;

template <std::size_t C1, class T1, std::size_t C2, class T2>
void require_same_shape(const Raster<C1, T1>& a, const Raster<C2, T2>& b, const char* what) {
  if (a.height() != b.height() || a.width() != b.width()) {
    throw ShapeError(std::string(what) + ": dimension mismatch (" + std::to_string(a.height()) +
                     "x" + std::to_string(a.width()) + " vs " + std::to_string(b.height()) + "x" +
                     std::to_string(b.width()) + ")");
  }
}

/// Extracts one channel of a multi-channel raster.
template <std::size_t C, class T>
Field channel_of(const Raster<C, T>& src, std::size_t ch) {
  Field out(src.height(), src.width());
  for (std::size_t r = 0; r < src.height(); ++r) {
    for (std::size_t c = 0; c < src.width(); ++c) {
      out.at(r, c) = src.at(r, c, ch);
    }
  }
  return out;
}

}  // namespace uwimg
