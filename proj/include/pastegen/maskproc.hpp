#pragma once

#include "pastegen/raster.hpp"

namespace pastegen {

// Sets every off-region not 4-connected to the image border to full
// coverage. Border-connected background and on-pixels are left unchanged.
AlphaMask fill_holes(const AlphaMask& mask);

// Gaussian-blurred coverage, clamped to [0,1]; sigma = 0 is the identity.
AlphaMask feather(const AlphaMask& mask, double sigma);

}  // namespace pastegen
