#pragma once

#include <string>
#include <vector>

#include "pastegen/raster.hpp"

namespace pastegen {

enum class SimplifyMethod { kGaussianBlur, kGray, kQuantize8Bit };

struct SimplifyStep {
  SimplifyMethod method = SimplifyMethod::kGray;
  double sigma = 2.0;  // gaussian_blur only

  bool operator==(const SimplifyStep&) const = default;
};

// Ordered chain of degradations; empty = leave the background untouched.
struct SimplifySpec {
  std::vector<SimplifyStep> steps;

  bool operator==(const SimplifySpec&) const = default;
};

Raster gaussian_blur(const Raster& img, double sigma);

// BT.601 luma, round half up, replicated to all channels.
Raster to_gray(const Raster& img);

// 3-3-2 bit truncation per pixel (8 bits total), reconstructed back to
// full range so output values come from fixed per-channel level sets.
Raster quantize_8bit(const Raster& img);

Raster simplify_background(const Raster& img, const SimplifySpec& spec);

std::string to_string(SimplifyMethod m);
SimplifyMethod simplify_method_from_string(const std::string& s);

}  // namespace pastegen
