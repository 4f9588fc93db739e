#include "pastegen/maskproc.hpp"

#include <algorithm>
#include <vector>

#include "pastegen/filters.hpp"

namespace pastegen {

AlphaMask fill_holes(const AlphaMask& mask) {
  const int w = mask.width();
  const int h = mask.height();

  // Flood background from the border, 4-connected over off-pixels.
  std::vector<std::uint8_t> exterior(static_cast<std::size_t>(w) * h, 0);
  std::vector<int> stack;
  auto idx = [w](int x, int y) { return static_cast<std::size_t>(y) * w + x; };
  auto push = [&](int x, int y) {
    std::size_t i = idx(x, y);
    if (!exterior[i] && !mask.on(x, y)) {
      exterior[i] = 1;
      stack.push_back(static_cast<int>(i));
    }
  };
  for (int x = 0; x < w; ++x) {
    push(x, 0);
    push(x, h - 1);
  }
  for (int y = 0; y < h; ++y) {
    push(0, y);
    push(w - 1, y);
  }
  while (!stack.empty()) {
    int i = stack.back();
    stack.pop_back();
    int x = i % w;
    int y = i / w;
    if (x > 0) push(x - 1, y);
    if (x + 1 < w) push(x + 1, y);
    if (y > 0) push(x, y - 1);
    if (y + 1 < h) push(x, y + 1);
  }

  AlphaMask out = mask;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.on(x, y) && !exterior[idx(x, y)]) out.at(x, y) = 1.0f;
    }
  }
  return out;
}

AlphaMask feather(const AlphaMask& mask, double sigma) {
  if (sigma <= 0.0) return mask;
  PlaneF p(mask.width(), mask.height());
  p.v.assign(mask.values().begin(), mask.values().end());
  PlaneF blurred = blur_plane(p, sigma);
  AlphaMask out(mask.width(), mask.height());
  for (std::size_t i = 0; i < blurred.v.size(); ++i) {
    out.values()[i] = std::clamp(blurred.v[i], 0.0f, 1.0f);
  }
  return out;
}

}  // namespace pastegen
