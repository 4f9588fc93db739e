#pragma once

#include <array>
#include <span>
#include <vector>

#include "pastegen/raster.hpp"
#include "pastegen/rng.hpp"

namespace pastegen {

// Parametric lighting style: a soft spotlight plus a per-channel tone
// remap, applied only inside the object mask.
struct StyleParams {
  double spot_u = 0.5;         // spotlight center, normalized within the
  double spot_v = 0.5;         // object's tight bbox
  double spot_radius = 0.4;    // fraction of the bbox diagonal
  double spot_gain = 1.0;      // multiplicative peak, [1.0, 1.8]
  std::array<double, 3> tone_gain{1.0, 1.0, 1.0};    // [0.7, 1.3]
  std::array<double, 3> tone_offset{0.0, 0.0, 0.0};  // [-25, +25] levels

  bool operator==(const StyleParams&) const = default;
};

enum class Provenance { kOriginal, kStyled };

struct SeedInstance {
  Raster raster;
  AlphaMask mask;
  int class_id = 0;
  Provenance provenance = Provenance::kOriginal;
  StyleParams style;  // meaningful only when provenance == kStyled
};

// Multiplies masked pixels by 1 + (gain-1) * exp(-d^2 / (2 r^2)), where d is
// the distance to the spotlight center and r is the radius in pixels.
Raster spotlight(const Raster& img, const AlphaMask& mask, const StyleParams& p);

// c' = clamp(round(c * tone_gain_c + tone_offset_c)) inside the mask.
Raster tone_shift(const Raster& img, const AlphaMask& mask, const StyleParams& p);

StyleParams draw_style_params(RngStream& rng);

// n styled copies with independently drawn params, spotlight then tone
// shift; the mask is shared unchanged.
std::vector<SeedInstance> make_variants(const SeedInstance& seed, int n, RngStream& rng);

// With probability p_styled pick uniformly from the styled pool, otherwise
// from the originals. Throws EmptyPool when the selected pool is empty.
const SeedInstance& select_seed(std::span<const SeedInstance> originals,
                                std::span<const SeedInstance> styled,
                                double p_styled, RngStream& rng);

}  // namespace pastegen
