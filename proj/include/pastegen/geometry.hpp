#pragma once

#include "pastegen/raster.hpp"

namespace pastegen {

// Intersection over union in pixel area. Symmetric, in [0,1].
double iou(const BBox& a, const BBox& b);

// Intersection box; w/h <= 0 when disjoint.
BBox intersect(const BBox& a, const BBox& b);

// Clip a box to [0,w) x [0,h); result may be invalid when fully outside.
BBox clip(const BBox& b, int width, int height);

// Smallest box containing every pixel with coverage >= 0.5.
// Throws EmptyMask when no pixel reaches the threshold.
BBox tight_bbox(const AlphaMask& mask);

}  // namespace pastegen
