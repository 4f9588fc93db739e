#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "pastegen/errors.hpp"

namespace pastegen {

// Interleaved 8-bit RGB image, row-major.
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, std::uint8_t fill = 0)
      : width_(width), height_(height) {
    if (width < 1 || height < 1) throw ValidationError("Raster dimensions must be >= 1");
    data_.assign(static_cast<std::size_t>(width) * height * 3, fill);
  }
  Raster(int width, int height, std::uint8_t r, std::uint8_t g, std::uint8_t b)
      : Raster(width, height) {
    for (std::size_t i = 0; i < data_.size(); i += 3) {
      data_[i] = r;
      data_[i + 1] = g;
      data_[i + 2] = b;
    }
  }

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }
  bool in_bounds(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  std::uint8_t* px(int x, int y) {
    return data_.data() + 3 * (static_cast<std::size_t>(y) * width_ + x);
  }
  const std::uint8_t* px(int x, int y) const {
    return data_.data() + 3 * (static_cast<std::size_t>(y) * width_ + x);
  }
  std::uint8_t at(int x, int y, int c) const { return px(x, y)[c]; }
  std::uint8_t& at(int x, int y, int c) { return px(x, y)[c]; }

  const std::vector<std::uint8_t>& bytes() const { return data_; }
  std::vector<std::uint8_t>& bytes() { return data_; }

  bool operator==(const Raster& o) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

// Per-pixel coverage in [0,1]. Geometry treats >= 0.5 as "on"; fractional
// coverage is only consumed by blending.
class AlphaMask {
 public:
  static constexpr float kOnThreshold = 0.5f;

  AlphaMask() = default;
  AlphaMask(int width, int height, float fill = 0.0f)
      : width_(width), height_(height) {
    if (width < 1 || height < 1) throw ValidationError("AlphaMask dimensions must be >= 1");
    data_.assign(static_cast<std::size_t>(width) * height, fill);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }
  bool in_bounds(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  float at(int x, int y) const {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  float& at(int x, int y) {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  bool on(int x, int y) const { return at(x, y) >= kOnThreshold; }

  const std::vector<float>& values() const { return data_; }
  std::vector<float>& values() { return data_; }

  bool operator==(const AlphaMask& o) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<float> data_;
};

// Axis-aligned integer box, top-left anchored.
struct BBox {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  bool valid() const { return w >= 1 && h >= 1; }
  long long area() const { return static_cast<long long>(w) * h; }
  int right() const { return x + w; }    // exclusive
  int bottom() const { return y + h; }   // exclusive
  bool contains(int px, int py) const {
    return px >= x && py >= y && px < right() && py < bottom();
  }
  bool operator==(const BBox& o) const = default;
};

// Single-channel float plane used by filtering and the Poisson solver.
template <typename T>
struct Plane {
  int w = 0;
  int h = 0;
  std::vector<T> v;

  Plane() = default;
  Plane(int width, int height, T fill = T{})
      : w(width), h(height), v(static_cast<std::size_t>(width) * height, fill) {}

  T at(int x, int y) const { return v[static_cast<std::size_t>(y) * w + x]; }
  T& at(int x, int y) { return v[static_cast<std::size_t>(y) * w + x]; }
};

using PlaneF = Plane<float>;
using PlaneD = Plane<double>;

// FNV-1a hash of the raw RGB bytes; used for determinism checks.
std::uint64_t pixel_hash(const Raster& img);

}  // namespace pastegen
