#include "pastegen/filters.hpp"

#include <algorithm>
#include <cmath>

namespace pastegen {

int reflect_index(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - 1 - i;
  }
  return i;
}

std::vector<float> gaussian_kernel(double sigma) {
  if (sigma <= 0.0) return {1.0f};
  int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<float> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    double w = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
    k[i + radius] = static_cast<float>(w);
    sum += w;
  }
  for (float& w : k) w = static_cast<float>(w / sum);
  return k;
}

PlaneF blur_plane(const PlaneF& src, double sigma) {
  if (sigma <= 0.0) return src;
  const std::vector<float> k = gaussian_kernel(sigma);
  const int r = static_cast<int>(k.size() / 2);

  PlaneF tmp(src.w, src.h);
  for (int y = 0; y < src.h; ++y) {
    for (int x = 0; x < src.w; ++x) {
      float acc = 0.0f;
      for (int i = -r; i <= r; ++i) {
        acc += k[i + r] * src.at(reflect_index(x + i, src.w), y);
      }
      tmp.at(x, y) = acc;
    }
  }
  PlaneF out(src.w, src.h);
  for (int y = 0; y < src.h; ++y) {
    for (int x = 0; x < src.w; ++x) {
      float acc = 0.0f;
      for (int i = -r; i <= r; ++i) {
        acc += k[i + r] * tmp.at(x, reflect_index(y + i, src.h));
      }
      out.at(x, y) = acc;
    }
  }
  return out;
}

std::array<PlaneF, 3> to_planes(const Raster& img) {
  std::array<PlaneF, 3> p{PlaneF(img.width(), img.height()),
                          PlaneF(img.width(), img.height()),
                          PlaneF(img.width(), img.height())};
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const std::uint8_t* s = img.px(x, y);
      p[0].at(x, y) = s[0];
      p[1].at(x, y) = s[1];
      p[2].at(x, y) = s[2];
    }
  }
  return p;
}

Raster from_planes(const std::array<PlaneF, 3>& planes) {
  Raster out(planes[0].w, planes[0].h);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      std::uint8_t* d = out.px(x, y);
      for (int c = 0; c < 3; ++c) {
        float v = std::round(planes[c].at(x, y));
        d[c] = static_cast<std::uint8_t>(std::clamp(v, 0.0f, 255.0f));
      }
    }
  }
  return out;
}

Raster resize_bilinear(const Raster& img, int out_w, int out_h) {
  if (out_w == img.width() && out_h == img.height()) return img;
  Raster out(out_w, out_h);
  const double sx = static_cast<double>(img.width()) / out_w;
  const double sy = static_cast<double>(img.height()) / out_h;
  for (int y = 0; y < out_h; ++y) {
    double fy = (y + 0.5) * sy - 0.5;
    int y0 = static_cast<int>(std::floor(fy));
    double wy = fy - y0;
    int ya = std::clamp(y0, 0, img.height() - 1);
    int yb = std::clamp(y0 + 1, 0, img.height() - 1);
    for (int x = 0; x < out_w; ++x) {
      double fx = (x + 0.5) * sx - 0.5;
      int x0 = static_cast<int>(std::floor(fx));
      double wx = fx - x0;
      int xa = std::clamp(x0, 0, img.width() - 1);
      int xb = std::clamp(x0 + 1, 0, img.width() - 1);
      const std::uint8_t* p00 = img.px(xa, ya);
      const std::uint8_t* p10 = img.px(xb, ya);
      const std::uint8_t* p01 = img.px(xa, yb);
      const std::uint8_t* p11 = img.px(xb, yb);
      std::uint8_t* d = out.px(x, y);
      for (int c = 0; c < 3; ++c) {
        double v = (1 - wy) * ((1 - wx) * p00[c] + wx * p10[c]) +
                   wy * ((1 - wx) * p01[c] + wx * p11[c]);
        d[c] = static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
      }
    }
  }
  return out;
}

}  // namespace pastegen
