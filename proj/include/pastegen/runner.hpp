#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "pastegen/config.hpp"
#include "pastegen/gapmeter.hpp"

namespace pastegen {

inline constexpr const char* kToolName = "pastegen";
inline constexpr const char* kToolVersion = "0.1.0";

// Stream index layout: one stream per generated image, far away from the
// per-seed variant streams, so adding images never perturbs variants.
inline constexpr std::uint64_t kImageStreamBase = 1'000'000ull;
inline constexpr std::uint64_t kVariantStreamBase = 1ull << 32;

std::uint64_t variant_stream_index(int class_index, int seed_index);

// Originals (masks hole-filled, cropped to the tight mask extent) plus the
// styled pool, either synthesized from variants_per_seed draws or loaded
// from cfg.variants_dir.
SeedPools load_seed_pools(const GenerationConfig& cfg, std::ostream& log);

struct RunStats {
  int images_written = 0;
  int images_failed = 0;
  int instances_skipped = 0;
};

// Full run: per-image jobs on a bounded worker pool, images written as
// {run_name}_{index:06}.png under output/images, annotations.json in COCO
// detection format, and a manifest that makes the run reproducible.
RunStats run_generate(const GenerationConfig& cfg, std::ostream& log);

// First k images of the same run with annotation boxes burned in, tiled
// row-major into one contact sheet; placement records go to `log`.
RunStats run_preview(const GenerationConfig& cfg, int k,
                     const std::filesystem::path& out_file, std::ostream& log);

struct GapmeterOptions {
  std::filesystem::path source_dir;
  std::filesystem::path target_dir;
  std::filesystem::path out_file;       // report JSON
  std::filesystem::path features_file;  // optional fc2 feature CSV
  bool before_after = false;
  int n_patches = 10000;  // per region per domain
  SplitSpec split;
  TrainParams hp;
  std::uint64_t seed = 0;
  // "after" transform: backgrounds simplified, half the foreground patches
  // restyled, mirroring the balanced pipeline.
  SimplifySpec after_simplify{{{SimplifyMethod::kGray}}};
  double after_p_styled = 0.5;
};

// Measures d_fg / d_bg / gap between two image sets. A set is either an
// annotated directory (has annotations.json) or a pre-cut patch tree with
// foreground/ and background/ subdirectories of 32x32 images.
void run_gapmeter(const GapmeterOptions& opts, std::ostream& log);

}  // namespace pastegen
