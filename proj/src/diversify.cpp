#include "pastegen/diversify.hpp"

#include <algorithm>
#include <cmath>

#include "pastegen/errors.hpp"
#include "pastegen/geometry.hpp"

namespace pastegen {

namespace {

inline std::uint8_t clamp_round(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

}  // namespace

Raster spotlight(const Raster& img, const AlphaMask& mask, const StyleParams& p) {
  if (p.spot_gain == 1.0) return img;
  BBox box = tight_bbox(mask);
  const double cx = box.x + p.spot_u * box.w;
  const double cy = box.y + p.spot_v * box.h;
  const double diag = std::sqrt(static_cast<double>(box.w) * box.w +
                                static_cast<double>(box.h) * box.h);
  const double r = std::max(p.spot_radius * diag, 1e-6);

  Raster out = img;
  for (int y = box.y; y < box.bottom(); ++y) {
    for (int x = box.x; x < box.right(); ++x) {
      if (!mask.on(x, y)) continue;
      double dx = x - cx;
      double dy = y - cy;
      double factor = 1.0 + (p.spot_gain - 1.0) * std::exp(-(dx * dx + dy * dy) / (2.0 * r * r));
      std::uint8_t* d = out.px(x, y);
      for (int c = 0; c < 3; ++c) d[c] = clamp_round(d[c] * factor);
    }
  }
  return out;
}

Raster tone_shift(const Raster& img, const AlphaMask& mask, const StyleParams& p) {
  Raster out = img;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (!mask.on(x, y)) continue;
      std::uint8_t* d = out.px(x, y);
      for (int c = 0; c < 3; ++c) {
        d[c] = clamp_round(d[c] * p.tone_gain[c] + p.tone_offset[c]);
      }
    }
  }
  return out;
}

StyleParams draw_style_params(RngStream& rng) {
  StyleParams p;
  p.spot_u = rng.uniform();
  p.spot_v = rng.uniform();
  p.spot_radius = rng.uniform(0.2, 0.6);
  p.spot_gain = rng.uniform(1.0, 1.8);
  for (int c = 0; c < 3; ++c) p.tone_gain[c] = rng.uniform(0.7, 1.3);
  for (int c = 0; c < 3; ++c) p.tone_offset[c] = rng.uniform(-25.0, 25.0);
  return p;
}

std::vector<SeedInstance> make_variants(const SeedInstance& seed, int n, RngStream& rng) {
  std::vector<SeedInstance> variants;
  variants.reserve(std::max(n, 0));
  for (int i = 0; i < n; ++i) {
    StyleParams p = draw_style_params(rng);
    SeedInstance v;
    v.raster = tone_shift(spotlight(seed.raster, seed.mask, p), seed.mask, p);
    v.mask = seed.mask;
    v.class_id = seed.class_id;
    v.provenance = Provenance::kStyled;
    v.style = p;
    variants.push_back(std::move(v));
  }
  return variants;
}

const SeedInstance& select_seed(std::span<const SeedInstance> originals,
                                std::span<const SeedInstance> styled,
                                double p_styled, RngStream& rng) {
  const bool pick_styled = rng.bernoulli(p_styled);
  std::span<const SeedInstance> pool = pick_styled ? styled : originals;
  if (pool.empty()) {
    throw EmptyPool(pick_styled ? "select_seed: styled pool is empty"
                                : "select_seed: original pool is empty");
  }
  return pool[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(pool.size()) - 1))];
}

}  // namespace pastegen
