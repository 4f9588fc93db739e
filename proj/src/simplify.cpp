#include "pastegen/simplify.hpp"

#include <cmath>

#include "pastegen/errors.hpp"
#include "pastegen/filters.hpp"

namespace pastegen {

Raster gaussian_blur(const Raster& img, double sigma) {
  if (sigma <= 0.0) return img;
  auto planes = to_planes(img);
  for (auto& p : planes) p = blur_plane(p, sigma);
  return from_planes(planes);
}

Raster to_gray(const Raster& img) {
  Raster out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const std::uint8_t* s = img.px(x, y);
      double luma = 0.299 * s[0] + 0.587 * s[1] + 0.114 * s[2];
      auto g = static_cast<std::uint8_t>(std::floor(luma + 0.5));
      std::uint8_t* d = out.px(x, y);
      d[0] = d[1] = d[2] = g;
    }
  }
  return out;
}

namespace {

inline std::uint8_t requantize(std::uint8_t c, int keep_bits) {
  const int levels = 1 << keep_bits;
  const int bucket = c >> (8 - keep_bits);
  return static_cast<std::uint8_t>(
      std::lround(static_cast<double>(bucket) * 255.0 / (levels - 1)));
}

}  // namespace

Raster quantize_8bit(const Raster& img) {
  Raster out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const std::uint8_t* s = img.px(x, y);
      std::uint8_t* d = out.px(x, y);
      d[0] = requantize(s[0], 3);
      d[1] = requantize(s[1], 3);
      d[2] = requantize(s[2], 2);
    }
  }
  return out;
}

Raster simplify_background(const Raster& img, const SimplifySpec& spec) {
  Raster out = img;
  for (const SimplifyStep& step : spec.steps) {
    switch (step.method) {
      case SimplifyMethod::kGaussianBlur:
        out = gaussian_blur(out, step.sigma);
        break;
      case SimplifyMethod::kGray:
        out = to_gray(out);
        break;
      case SimplifyMethod::kQuantize8Bit:
        out = quantize_8bit(out);
        break;
    }
  }
  return out;
}

std::string to_string(SimplifyMethod m) {
  switch (m) {
    case SimplifyMethod::kGaussianBlur: return "gaussian_blur";
    case SimplifyMethod::kGray: return "gray";
    case SimplifyMethod::kQuantize8Bit: return "quantize_8bit";
  }
  return "unknown";
}

SimplifyMethod simplify_method_from_string(const std::string& s) {
  if (s == "gaussian_blur" || s == "blur") return SimplifyMethod::kGaussianBlur;
  if (s == "gray" || s == "grey") return SimplifyMethod::kGray;
  if (s == "quantize_8bit" || s == "quantize") return SimplifyMethod::kQuantize8Bit;
  throw ParseError("unknown simplify method: " + s);
}

}  // namespace pastegen
