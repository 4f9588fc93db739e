#include "pastegen/geometry.hpp"

#include <algorithm>

namespace pastegen {

BBox intersect(const BBox& a, const BBox& b) {
  int x0 = std::max(a.x, b.x);
  int y0 = std::max(a.y, b.y);
  int x1 = std::min(a.right(), b.right());
  int y1 = std::min(a.bottom(), b.bottom());
  return {x0, y0, x1 - x0, y1 - y0};
}

BBox clip(const BBox& b, int width, int height) {
  return intersect(b, {0, 0, width, height});
}

double iou(const BBox& a, const BBox& b) {
  BBox i = intersect(a, b);
  if (i.w <= 0 || i.h <= 0) return 0.0;
  long long inter = i.area();
  long long uni = a.area() + b.area() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

BBox tight_bbox(const AlphaMask& mask) {
  int x0 = mask.width(), y0 = mask.height(), x1 = -1, y1 = -1;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.on(x, y)) continue;
      x0 = std::min(x0, x);
      y0 = std::min(y0, y);
      x1 = std::max(x1, x);
      y1 = std::max(y1, y);
    }
  }
  if (x1 < 0) throw EmptyMask("tight_bbox: no pixel reaches coverage 0.5");
  return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

}  // namespace pastegen
