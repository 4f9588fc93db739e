#pragma once

#include <array>
#include <vector>

#include "pastegen/raster.hpp"

namespace pastegen {

// Normalized sampled Gaussian, radius = ceil(3*sigma), odd length 2r+1.
// sigma = 0 yields the identity kernel {1}.
std::vector<float> gaussian_kernel(double sigma);

// Separable convolution with reflect borders. Both passes run in float;
// no intermediate quantization.
PlaneF blur_plane(const PlaneF& src, double sigma);

// Reflect indexing: -1 -> 0, -2 -> 1, n -> n-1, folding as needed.
int reflect_index(int i, int n);

std::array<PlaneF, 3> to_planes(const Raster& img);
Raster from_planes(const std::array<PlaneF, 3>& planes);

Raster resize_bilinear(const Raster& img, int out_w, int out_h);

}  // namespace pastegen
