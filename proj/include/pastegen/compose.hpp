#pragma once

#include <span>
#include <string>
#include <vector>

#include "pastegen/diversify.hpp"
#include "pastegen/raster.hpp"
#include "pastegen/rng.hpp"

namespace pastegen {

enum class BlendMode { kDirect, kFeathered, kPoisson };

std::string to_string(BlendMode m);
BlendMode blend_mode_from_string(const std::string& s);

struct ComposeParams {
  int min_objects = 3;
  int max_objects = 8;
  double scale_min = 0.5;
  double scale_max = 1.5;
  double rotation_min_deg = -30.0;
  double rotation_max_deg = 30.0;
  double occ_prob = 0.5;
  std::vector<BlendMode> blend_modes{BlendMode::kDirect, BlendMode::kFeathered,
                                     BlendMode::kPoisson};
  double feather_sigma = 1.0;
  double min_visible_fraction = 0.25;
  bool min_box_filter = true;
  int min_box_w = 50;
  int min_box_h = 30;
  bool full_extent_boxes = false;

  bool operator==(const ComposeParams&) const = default;
};

struct PlacementRecord {
  int class_id = 0;
  Provenance provenance = Provenance::kOriginal;
  double scale = 1.0;
  double rotation_deg = 0.0;
  int x = 0;  // top-left of the placed instance on the canvas
  int y = 0;
  BlendMode blend_mode = BlendMode::kDirect;
  bool near_previous = false;
  bool had_priors = false;
  BBox placed_box;  // in-frame extent of the placed binary mask
  bool poisson_converged = true;
};

struct Annotation {
  int class_id = 0;
  BBox box;
};

struct SceneResult {
  Raster image;
  std::vector<Annotation> annotations;
  std::vector<PlacementRecord> placements;
  // Per-pixel owning placement index, -1 for background. Later pastes
  // claim pixels from earlier ones, so visible masks tile the canvas.
  std::vector<int> owner;
  int skipped = 0;
  int poisson_nonconverged = 0;
};

struct SeedPools {
  std::vector<SeedInstance> originals;
  std::vector<SeedInstance> styled;
  double p_styled = 0.5;
};

// Bilinear resample of raster and mask under rotation (degrees, about the
// instance center) and uniform scale; output is cropped to the tight extent
// of the transformed mask. Throws DegenerateScale when that extent is
// smaller than 2x2.
SeedInstance transform_instance(const SeedInstance& inst, double scale,
                                double rotation_deg);

struct Position {
  int x = 0;
  int y = 0;
  bool near_previous = false;
};

// With probability occ_prob (and priors available) place the new center
// near a uniformly chosen prior box: prior center plus a uniform offset of
// up to half the prior's dims per axis. Otherwise uniform over in-frame
// positions. Either way the position is clamped so at least
// min_visible_fraction of the instance area stays in frame (enforced per
// axis at sqrt(min_visible_fraction)). Throws NoValidPosition when no
// position satisfies the constraint.
Position sample_position(int canvas_w, int canvas_h, int inst_w, int inst_h,
                         std::span<const PlacementRecord> priors, double occ_prob,
                         double min_visible_fraction, RngStream& rng);

struct BlendOutcome {
  bool poisson_converged = true;
  int poisson_iterations = 0;
};

// Paste the instance with its top-left at (x, y). Direct uses the binary
// mask; feathered blurs the coverage before alpha-compositing; poisson
// solves the gradient-domain equation over the instance box with source
// gradients inside the mask and canvas gradients outside.
BlendOutcome blend(Raster& canvas, const SeedInstance& inst, int x, int y,
                   BlendMode mode, double feather_sigma);

// Full pipeline for one image: draw an object count, then per object
// select_seed -> transform_instance -> sample_position -> blend. Placement
// failures skip the instance and never fail the image. Annotation boxes are
// measured from the final visible (owner) masks unless full_extent_boxes is
// set, and are dropped when they fail the minimum box filter.
SceneResult compose_scene(const Raster& background, const SeedPools& pools,
                          const ComposeParams& params, RngStream& rng);

}  // namespace pastegen
