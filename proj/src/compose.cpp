#include "pastegen/compose.hpp"

#include <algorithm>
#include <cmath>

#include "pastegen/errors.hpp"
#include "pastegen/filters.hpp"
#include "pastegen/geometry.hpp"
#include "pastegen/poisson.hpp"

namespace pastegen {

std::string to_string(BlendMode m) {
  switch (m) {
    case BlendMode::kDirect: return "direct";
    case BlendMode::kFeathered: return "feathered";
    case BlendMode::kPoisson: return "poisson";
  }
  return "unknown";
}

BlendMode blend_mode_from_string(const std::string& s) {
  if (s == "direct") return BlendMode::kDirect;
  if (s == "feathered") return BlendMode::kFeathered;
  if (s == "poisson") return BlendMode::kPoisson;
  throw ParseError("unknown blend mode: " + s);
}

namespace {

inline std::uint8_t clamp_round(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

// Bilinear taps at continuous pixel coordinates (centers at x+0.5).
double sample_mask(const AlphaMask& m, double fx, double fy) {
  fx -= 0.5;
  fy -= 0.5;
  int x0 = static_cast<int>(std::floor(fx));
  int y0 = static_cast<int>(std::floor(fy));
  double wx = fx - x0;
  double wy = fy - y0;
  auto tap = [&](int x, int y) -> double {
    return m.in_bounds(x, y) ? m.at(x, y) : 0.0;
  };
  return (1 - wy) * ((1 - wx) * tap(x0, y0) + wx * tap(x0 + 1, y0)) +
         wy * ((1 - wx) * tap(x0, y0 + 1) + wx * tap(x0 + 1, y0 + 1));
}

double sample_raster(const Raster& r, double fx, double fy, int c) {
  fx -= 0.5;
  fy -= 0.5;
  int x0 = static_cast<int>(std::floor(fx));
  int y0 = static_cast<int>(std::floor(fy));
  double wx = fx - x0;
  double wy = fy - y0;
  auto tap = [&](int x, int y) -> double {
    x = std::clamp(x, 0, r.width() - 1);
    y = std::clamp(y, 0, r.height() - 1);
    return r.at(x, y, c);
  };
  return (1 - wy) * ((1 - wx) * tap(x0, y0) + wx * tap(x0 + 1, y0)) +
         wy * ((1 - wx) * tap(x0, y0 + 1) + wx * tap(x0 + 1, y0 + 1));
}

}  // namespace

SeedInstance transform_instance(const SeedInstance& inst, double scale,
                                double rotation_deg) {
  const int w = inst.raster.width();
  const int h = inst.raster.height();
  const double theta = rotation_deg * 3.14159265358979323846 / 180.0;
  const double ct = std::cos(theta);
  const double st = std::sin(theta);

  // Output extent from the transformed corners of the input rect.
  const double hw = 0.5 * w * scale;
  const double hh = 0.5 * h * scale;
  const double ext_x = std::abs(ct) * hw + std::abs(st) * hh;
  const double ext_y = std::abs(st) * hw + std::abs(ct) * hh;
  const int out_w = std::max(1, static_cast<int>(std::ceil(2.0 * ext_x)));
  const int out_h = std::max(1, static_cast<int>(std::ceil(2.0 * ext_y)));

  const double cx = 0.5 * w;
  const double cy = 0.5 * h;
  const double ocx = 0.5 * out_w;
  const double ocy = 0.5 * out_h;
  const double inv_scale = 1.0 / scale;

  Raster raster(out_w, out_h);
  AlphaMask mask(out_w, out_h);
  for (int y = 0; y < out_h; ++y) {
    for (int x = 0; x < out_w; ++x) {
      double dx = (x + 0.5) - ocx;
      double dy = (y + 0.5) - ocy;
      // inverse: rotate by -theta, then unscale
      double sx = (ct * dx + st * dy) * inv_scale + cx;
      double sy = (-st * dx + ct * dy) * inv_scale + cy;
      mask.at(x, y) = static_cast<float>(sample_mask(inst.mask, sx, sy));
      std::uint8_t* d = raster.px(x, y);
      for (int c = 0; c < 3; ++c) {
        d[c] = clamp_round(sample_raster(inst.raster, sx, sy, c));
      }
    }
  }

  BBox box;
  try {
    box = tight_bbox(mask);
  } catch (const EmptyMask&) {
    throw DegenerateScale("transform_instance: mask vanished after resampling");
  }
  if (box.w < 2 || box.h < 2) {
    throw DegenerateScale("transform_instance: resulting extent below 2x2");
  }

  SeedInstance out;
  out.raster = Raster(box.w, box.h);
  out.mask = AlphaMask(box.w, box.h);
  for (int y = 0; y < box.h; ++y) {
    for (int x = 0; x < box.w; ++x) {
      out.mask.at(x, y) = mask.at(box.x + x, box.y + y);
      const std::uint8_t* s = raster.px(box.x + x, box.y + y);
      std::uint8_t* d = out.raster.px(x, y);
      d[0] = s[0];
      d[1] = s[1];
      d[2] = s[2];
    }
  }
  out.class_id = inst.class_id;
  out.provenance = inst.provenance;
  out.style = inst.style;
  return out;
}

namespace {

struct AxisRange {
  int lo = 0;
  int hi = 0;
};

// Positions keeping at least `frac` of the instance length in frame.
AxisRange axis_range(int canvas, int size, double frac) {
  int lo = static_cast<int>(std::ceil(frac * size - size));
  int hi = static_cast<int>(std::floor(canvas - frac * size));
  if (lo > hi) throw NoValidPosition("sample_position: instance cannot keep enough area in frame");
  return {lo, hi};
}

}  // namespace

Position sample_position(int canvas_w, int canvas_h, int inst_w, int inst_h,
                         std::span<const PlacementRecord> priors, double occ_prob,
                         double min_visible_fraction, RngStream& rng) {
  // Per-axis fraction sqrt(f) keeps the in-frame area at >= f.
  const double frac = std::sqrt(std::clamp(min_visible_fraction, 0.0, 1.0));
  AxisRange rx = axis_range(canvas_w, inst_w, frac);
  AxisRange ry = axis_range(canvas_h, inst_h, frac);

  Position pos;
  if (!priors.empty() && rng.bernoulli(occ_prob)) {
    const PlacementRecord& prior =
        priors[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(priors.size()) - 1))];
    const BBox& pb = prior.placed_box;
    double pcx = pb.x + 0.5 * pb.w;
    double pcy = pb.y + 0.5 * pb.h;
    double cx = pcx + rng.uniform(-0.5 * pb.w, 0.5 * pb.w);
    double cy = pcy + rng.uniform(-0.5 * pb.h, 0.5 * pb.h);
    pos.x = static_cast<int>(std::llround(cx - 0.5 * inst_w));
    pos.y = static_cast<int>(std::llround(cy - 0.5 * inst_h));
    pos.near_previous = true;
  } else {
    pos.x = rng.uniform_int(rx.lo, rx.hi);
    pos.y = rng.uniform_int(ry.lo, ry.hi);
  }
  pos.x = std::clamp(pos.x, rx.lo, rx.hi);
  pos.y = std::clamp(pos.y, ry.lo, ry.hi);
  return pos;
}

namespace {

void blend_direct(Raster& canvas, const SeedInstance& inst, int px, int py) {
  for (int y = 0; y < inst.mask.height(); ++y) {
    int cy = py + y;
    if (cy < 0 || cy >= canvas.height()) continue;
    for (int x = 0; x < inst.mask.width(); ++x) {
      int cx = px + x;
      if (cx < 0 || cx >= canvas.width()) continue;
      if (!inst.mask.on(x, y)) continue;
      const std::uint8_t* s = inst.raster.px(x, y);
      std::uint8_t* d = canvas.px(cx, cy);
      d[0] = s[0];
      d[1] = s[1];
      d[2] = s[2];
    }
  }
}

void blend_feathered(Raster& canvas, const SeedInstance& inst, int px, int py,
                     double sigma) {
  // Zero-pad the coverage so the feather falls off outside the instance.
  const int pad = static_cast<int>(std::ceil(3.0 * sigma));
  PlaneF alpha(inst.mask.width() + 2 * pad, inst.mask.height() + 2 * pad, 0.0f);
  for (int y = 0; y < inst.mask.height(); ++y) {
    for (int x = 0; x < inst.mask.width(); ++x) {
      alpha.at(x + pad, y + pad) = inst.mask.at(x, y);
    }
  }
  alpha = blur_plane(alpha, sigma);

  for (int y = 0; y < alpha.h; ++y) {
    int cy = py + y - pad;
    if (cy < 0 || cy >= canvas.height()) continue;
    for (int x = 0; x < alpha.w; ++x) {
      int cx = px + x - pad;
      if (cx < 0 || cx >= canvas.width()) continue;
      double a = std::clamp(static_cast<double>(alpha.at(x, y)), 0.0, 1.0);
      if (a <= 0.0) continue;
      int ix = std::clamp(x - pad, 0, inst.raster.width() - 1);
      int iy = std::clamp(y - pad, 0, inst.raster.height() - 1);
      const std::uint8_t* s = inst.raster.px(ix, iy);
      std::uint8_t* d = canvas.px(cx, cy);
      for (int c = 0; c < 3; ++c) {
        d[c] = clamp_round(a * s[c] + (1.0 - a) * d[c]);
      }
    }
  }
}

BlendOutcome blend_poisson(Raster& canvas, const SeedInstance& inst, int px, int py) {
  // Solve region: instance box grown by one ring, clipped to the canvas.
  BBox region = clip({px - 1, py - 1, inst.raster.width() + 2, inst.raster.height() + 2},
                     canvas.width(), canvas.height());
  BlendOutcome out;
  if (region.w < 3 || region.h < 3) return out;

  auto fg_at = [&](int cx, int cy, int c) -> double {
    int ix = std::clamp(cx - px, 0, inst.raster.width() - 1);
    int iy = std::clamp(cy - py, 0, inst.raster.height() - 1);
    return inst.raster.at(ix, iy, c);
  };
  auto in_mask = [&](int cx, int cy) -> bool {
    int ix = cx - px;
    int iy = cy - py;
    return inst.mask.in_bounds(ix, iy) && inst.mask.on(ix, iy);
  };

  const int offs[4][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
  for (int c = 0; c < 3; ++c) {
    PlaneD initial(region.w, region.h);
    PlaneD div_v(region.w, region.h, 0.0);
    for (int y = 0; y < region.h; ++y) {
      for (int x = 0; x < region.w; ++x) {
        initial.at(x, y) = canvas.at(region.x + x, region.y + y, c);
      }
    }
    for (int y = 1; y < region.h - 1; ++y) {
      for (int x = 1; x < region.w - 1; ++x) {
        int cx = region.x + x;
        int cy = region.y + y;
        double div = 0.0;
        for (const auto& o : offs) {
          int qx = cx + o[0];
          int qy = cy + o[1];
          // Edges touching the mask carry foreground gradients, the rest
          // keep the canvas gradients.
          if (in_mask(cx, cy) || in_mask(qx, qy)) {
            div += fg_at(qx, qy, c) - fg_at(cx, cy, c);
          } else {
            div += canvas.at(qx, qy, c) - canvas.at(cx, cy, c);
          }
        }
        div_v.at(x, y) = div;
      }
    }
    PoissonResult res = poisson_solve(initial, div_v);
    out.poisson_converged = out.poisson_converged && res.converged;
    out.poisson_iterations = std::max(out.poisson_iterations, res.iterations);
    for (int y = 1; y < region.h - 1; ++y) {
      for (int x = 1; x < region.w - 1; ++x) {
        canvas.at(region.x + x, region.y + y, c) = clamp_round(res.f.at(x, y));
      }
    }
  }
  return out;
}

}  // namespace

BlendOutcome blend(Raster& canvas, const SeedInstance& inst, int x, int y,
                   BlendMode mode, double feather_sigma) {
  switch (mode) {
    case BlendMode::kDirect:
      blend_direct(canvas, inst, x, y);
      return {};
    case BlendMode::kFeathered:
      blend_feathered(canvas, inst, x, y, feather_sigma);
      return {};
    case BlendMode::kPoisson:
      return blend_poisson(canvas, inst, x, y);
  }
  return {};
}

SceneResult compose_scene(const Raster& background, const SeedPools& pools,
                          const ComposeParams& params, RngStream& rng) {
  SceneResult res;
  res.image = background;
  const int W = background.width();
  const int H = background.height();
  res.owner.assign(static_cast<std::size_t>(W) * H, -1);

  const int k = rng.uniform_int(params.min_objects, params.max_objects);
  for (int i = 0; i < k; ++i) {
    const SeedInstance& seed =
        select_seed(pools.originals, pools.styled, pools.p_styled, rng);
    const double scale = rng.uniform(params.scale_min, params.scale_max);
    const double rot = rng.uniform(params.rotation_min_deg, params.rotation_max_deg);

    SeedInstance inst;
    Position pos;
    try {
      inst = transform_instance(seed, scale, rot);
      pos = sample_position(W, H, inst.raster.width(), inst.raster.height(),
                            res.placements, params.occ_prob,
                            params.min_visible_fraction, rng);
    } catch (const DegenerateScale&) {
      ++res.skipped;
      continue;
    } catch (const NoValidPosition&) {
      ++res.skipped;
      continue;
    }

    // In-frame extent of the binary mask, before blending.
    int bx0 = W, by0 = H, bx1 = -1, by1 = -1;
    for (int my = 0; my < inst.mask.height(); ++my) {
      int cy = pos.y + my;
      if (cy < 0 || cy >= H) continue;
      for (int mx = 0; mx < inst.mask.width(); ++mx) {
        int cx = pos.x + mx;
        if (cx < 0 || cx >= W) continue;
        if (!inst.mask.on(mx, my)) continue;
        bx0 = std::min(bx0, cx);
        by0 = std::min(by0, cy);
        bx1 = std::max(bx1, cx);
        by1 = std::max(by1, cy);
      }
    }
    if (bx1 < 0) {
      ++res.skipped;
      continue;
    }

    BlendMode mode = params.blend_modes[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<int>(params.blend_modes.size()) - 1))];
    BlendOutcome outcome = blend(res.image, inst, pos.x, pos.y, mode, params.feather_sigma);
    if (!outcome.poisson_converged) ++res.poisson_nonconverged;

    const int idx = static_cast<int>(res.placements.size());
    for (int my = 0; my < inst.mask.height(); ++my) {
      int cy = pos.y + my;
      if (cy < 0 || cy >= H) continue;
      for (int mx = 0; mx < inst.mask.width(); ++mx) {
        int cx = pos.x + mx;
        if (cx < 0 || cx >= W) continue;
        if (inst.mask.on(mx, my)) res.owner[static_cast<std::size_t>(cy) * W + cx] = idx;
      }
    }

    PlacementRecord rec;
    rec.class_id = inst.class_id;
    rec.provenance = inst.provenance;
    rec.scale = scale;
    rec.rotation_deg = rot;
    rec.x = pos.x;
    rec.y = pos.y;
    rec.blend_mode = mode;
    rec.near_previous = pos.near_previous;
    rec.had_priors = !res.placements.empty();
    rec.placed_box = {bx0, by0, bx1 - bx0 + 1, by1 - by0 + 1};
    rec.poisson_converged = outcome.poisson_converged;
    res.placements.push_back(rec);
  }

  // Annotation boxes from the final visible masks (or the full in-frame
  // extent when configured).
  const int n = static_cast<int>(res.placements.size());
  std::vector<int> x0(n, W), y0(n, H), x1(n, -1), y1(n, -1);
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      int o = res.owner[static_cast<std::size_t>(y) * W + x];
      if (o < 0) continue;
      x0[o] = std::min(x0[o], x);
      y0[o] = std::min(y0[o], y);
      x1[o] = std::max(x1[o], x);
      y1[o] = std::max(y1[o], y);
    }
  }
  for (int i = 0; i < n; ++i) {
    BBox box;
    if (params.full_extent_boxes) {
      box = res.placements[i].placed_box;
    } else {
      if (x1[i] < 0) continue;  // fully occluded
      box = {x0[i], y0[i], x1[i] - x0[i] + 1, y1[i] - y0[i] + 1};
    }
    if (params.min_box_filter && (box.w < params.min_box_w || box.h < params.min_box_h)) {
      continue;
    }
    res.annotations.push_back({res.placements[i].class_id, box});
  }
  return res;
}

}  // namespace pastegen
