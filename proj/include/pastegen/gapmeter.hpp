#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "pastegen/cnn.hpp"
#include "pastegen/raster.hpp"
#include "pastegen/rng.hpp"

namespace pastegen {

enum class Domain { kSource, kTarget };
enum class Region { kForeground, kBackground };

std::string to_string(Domain d);
std::string to_string(Region r);

struct Patch {
  Raster raster;  // exactly 32x32
  int scene_id = 0;
};

struct PatchSet {
  std::vector<Patch> patches;
  Domain domain = Domain::kSource;
  Region region = Region::kForeground;
};

struct AnnotatedImage {
  Raster image;
  std::vector<BBox> boxes;
  int scene_id = 0;
};

// Foreground: uniform 32x32 crops fully inside a uniformly chosen ground
// truth box (boxes smaller than the patch are skipped). Background:
// rejection-sampled windows with IoU < 0.1 against every box. Throws
// InsufficientRegion when the attempt budget runs out before n patches.
PatchSet extract_patches(std::span<const AnnotatedImage> images, Domain domain,
                         Region region, int n, RngStream& rng,
                         int max_attempts_per_patch = 200);

constexpr double kBackgroundIouLimit = 0.1;

struct SplitSpec {
  double train_fraction = 0.7;
  double val_fraction = 0.1;
  double test_fraction = 0.2;
  bool scene_disjoint = true;

  bool operator==(const SplitSpec&) const = default;
};

struct LabeledPatch {
  const Raster* raster = nullptr;
  int label = 0;  // 0 = source, 1 = target
  int scene_id = 0;
};

struct DataSplit {
  std::vector<LabeledPatch> train, val, test;
};

// Largest-remainder apportionment of n items over the three fractions.
std::array<int, 3> largest_remainder_counts(int n, const SplitSpec& spec);

// Scene-disjoint split: each domain's scenes are shuffled and apportioned
// by largest remainder, so no scene id crosses splits and both domains
// appear in every split. Throws TooFewScenes when a domain has fewer than
// three scenes (disjoint mode).
DataSplit make_split(const PatchSet& source, const PatchSet& target,
                     const SplitSpec& spec, RngStream& rng);

struct TrainedClassifier {
  DomainClassifier net;
  double best_val_accuracy = 0.0;
  int best_epoch = -1;
};

// Mini-batch SGD with momentum on softmax cross-entropy over domain
// labels; returns the epoch snapshot with the highest validation accuracy.
TrainedClassifier train_classifier(const DataSplit& split, const TrainParams& hp,
                                   RngStream& rng);

double evaluate_accuracy(const DomainClassifier& net,
                         std::span<const LabeledPatch> patches);

// d = 2 * (1 - (err_S + err_T)), clamped to [0, 2].
double h_from_errors(double err_source, double err_target);

struct DivergenceValue {
  double d = 0.0;
  double err_source = 0.0;
  double err_target = 0.0;
};

// Error rates measured on held-out patches of each domain.
// Throws EmptyTestSet when either domain is missing from `test`.
DivergenceValue h_divergence(const DomainClassifier& net,
                             std::span<const LabeledPatch> test);

struct RegionMeasurement {
  DivergenceValue divergence;
  double val_accuracy = 0.0;
  int best_epoch = -1;
  int n_train = 0;
  int n_val = 0;
  int n_test = 0;
};

struct DivergenceReport {
  RegionMeasurement fg;
  RegionMeasurement bg;
  double gap = 0.0;  // |d_fg - d_bg|
  SplitSpec split;
  TrainParams hp;
};

struct FeatureRow {
  int patch_id = 0;
  Domain domain = Domain::kSource;
  Region region = Region::kForeground;
  std::array<double, DomainClassifier::kFc2> values{};
};

// Runs split -> train -> h_divergence independently for foreground and
// background. When `features` is non-null it receives the fc2 feature
// vector of every input patch, evaluated with that region's classifier.
DivergenceReport gap_report(const PatchSet& fg_source, const PatchSet& fg_target,
                            const PatchSet& bg_source, const PatchSet& bg_target,
                            const SplitSpec& spec, const TrainParams& hp,
                            RngStream& rng, std::vector<FeatureRow>* features = nullptr);

}  // namespace pastegen
