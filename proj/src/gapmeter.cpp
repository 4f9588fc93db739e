#include "pastegen/gapmeter.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "pastegen/errors.hpp"
#include "pastegen/geometry.hpp"

namespace pastegen {

std::string to_string(Domain d) {
  return d == Domain::kSource ? "source" : "target";
}

std::string to_string(Region r) {
  return r == Region::kForeground ? "foreground" : "background";
}

PatchSet extract_patches(std::span<const AnnotatedImage> images, Domain domain,
                         Region region, int n, RngStream& rng,
                         int max_attempts_per_patch) {
  if (n < 1) throw ValidationError("extract_patches: n must be >= 1");
  if (images.empty()) throw InsufficientRegion("extract_patches: no images");
  constexpr int P = DomainClassifier::kIn;

  PatchSet set;
  set.domain = domain;
  set.region = region;
  set.patches.reserve(n);

  long long budget = static_cast<long long>(n) * max_attempts_per_patch;
  const int n_images = static_cast<int>(images.size());
  while (static_cast<int>(set.patches.size()) < n) {
    if (budget-- <= 0) {
      throw InsufficientRegion("extract_patches: attempt budget exhausted for " +
                               to_string(region) + " patches");
    }
    const AnnotatedImage& im = images[rng.uniform_int(0, n_images - 1)];
    if (im.image.width() < P || im.image.height() < P) continue;

    if (region == Region::kForeground) {
      if (im.boxes.empty()) continue;
      const BBox& box = im.boxes[rng.uniform_int(0, static_cast<int>(im.boxes.size()) - 1)];
      BBox in_frame = clip(box, im.image.width(), im.image.height());
      if (in_frame.w < P || in_frame.h < P) continue;
      int x = rng.uniform_int(in_frame.x, in_frame.right() - P);
      int y = rng.uniform_int(in_frame.y, in_frame.bottom() - P);
      Patch p;
      p.scene_id = im.scene_id;
      p.raster = Raster(P, P);
      for (int yy = 0; yy < P; ++yy) {
        for (int xx = 0; xx < P; ++xx) {
          const std::uint8_t* s = im.image.px(x + xx, y + yy);
          std::uint8_t* d = p.raster.px(xx, yy);
          d[0] = s[0];
          d[1] = s[1];
          d[2] = s[2];
        }
      }
      set.patches.push_back(std::move(p));
    } else {
      int x = rng.uniform_int(0, im.image.width() - P);
      int y = rng.uniform_int(0, im.image.height() - P);
      BBox window{x, y, P, P};
      bool ok = true;
      for (const BBox& box : im.boxes) {
        if (iou(window, box) >= kBackgroundIouLimit) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      Patch p;
      p.scene_id = im.scene_id;
      p.raster = Raster(P, P);
      for (int yy = 0; yy < P; ++yy) {
        for (int xx = 0; xx < P; ++xx) {
          const std::uint8_t* s = im.image.px(x + xx, y + yy);
          std::uint8_t* d = p.raster.px(xx, yy);
          d[0] = s[0];
          d[1] = s[1];
          d[2] = s[2];
        }
      }
      set.patches.push_back(std::move(p));
    }
  }
  return set;
}

std::array<int, 3> largest_remainder_counts(int n, const SplitSpec& spec) {
  const double fr[3] = {spec.train_fraction, spec.val_fraction, spec.test_fraction};
  std::array<int, 3> counts{};
  double rem[3];
  int assigned = 0;
  for (int i = 0; i < 3; ++i) {
    double quota = n * fr[i];
    counts[i] = static_cast<int>(std::floor(quota));
    rem[i] = quota - counts[i];
    assigned += counts[i];
  }
  int left = n - assigned;
  // Hand leftovers to the largest remainders; ties go to the earlier split.
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return rem[a] > rem[b]; });
  for (int i = 0; i < left; ++i) counts[order[i % 3]] += 1;
  return counts;
}

namespace {

template <typename T>
void shuffle_vec(std::vector<T>& v, RngStream& rng) {
  for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) {
    std::swap(v[i], v[static_cast<std::size_t>(rng.uniform_int(0, i))]);
  }
}

// Scene id -> split bucket (0 train, 1 val, 2 test) for one domain.
std::map<int, int> assign_scenes(const PatchSet& set, const SplitSpec& spec,
                                 RngStream& rng) {
  std::vector<int> scenes;
  for (const Patch& p : set.patches) scenes.push_back(p.scene_id);
  std::sort(scenes.begin(), scenes.end());
  scenes.erase(std::unique(scenes.begin(), scenes.end()), scenes.end());
  if (static_cast<int>(scenes.size()) < 3) {
    throw TooFewScenes("make_split: domain '" + to_string(set.domain) +
                       "' has fewer than 3 distinct scenes");
  }
  shuffle_vec(scenes, rng);
  std::array<int, 3> counts = largest_remainder_counts(static_cast<int>(scenes.size()), spec);
  // Every split needs at least one scene so both domains stay represented.
  for (int s = 0; s < 3; ++s) {
    while (counts[s] == 0) {
      int donor = static_cast<int>(std::max_element(counts.begin(), counts.end()) -
                                   counts.begin());
      --counts[donor];
      ++counts[s];
    }
  }
  std::map<int, int> bucket;
  int at = 0;
  for (int s = 0; s < 3; ++s) {
    for (int i = 0; i < counts[s]; ++i) bucket[scenes[at++]] = s;
  }
  return bucket;
}

void append_patches(const PatchSet& set, int label, const std::map<int, int>& bucket,
                    DataSplit& split) {
  for (const Patch& p : set.patches) {
    LabeledPatch lp{&p.raster, label, p.scene_id};
    switch (bucket.at(p.scene_id)) {
      case 0: split.train.push_back(lp); break;
      case 1: split.val.push_back(lp); break;
      default: split.test.push_back(lp); break;
    }
  }
}

// Non-disjoint fallback: apportion patches directly.
void append_patches_flat(const PatchSet& set, int label, const SplitSpec& spec,
                         RngStream& rng, DataSplit& split) {
  std::vector<int> order(set.patches.size());
  std::iota(order.begin(), order.end(), 0);
  shuffle_vec(order, rng);
  std::array<int, 3> counts =
      largest_remainder_counts(static_cast<int>(order.size()), spec);
  int at = 0;
  for (int s = 0; s < 3; ++s) {
    for (int i = 0; i < counts[s]; ++i) {
      const Patch& p = set.patches[order[at++]];
      LabeledPatch lp{&p.raster, label, p.scene_id};
      if (s == 0) split.train.push_back(lp);
      else if (s == 1) split.val.push_back(lp);
      else split.test.push_back(lp);
    }
  }
}

}  // namespace

DataSplit make_split(const PatchSet& source, const PatchSet& target,
                     const SplitSpec& spec, RngStream& rng) {
  const double total = spec.train_fraction + spec.val_fraction + spec.test_fraction;
  if (std::abs(total - 1.0) > 1e-9) {
    throw ValidationError("make_split: split fractions must sum to 1");
  }
  DataSplit split;
  if (spec.scene_disjoint) {
    auto src_bucket = assign_scenes(source, spec, rng);
    auto tgt_bucket = assign_scenes(target, spec, rng);
    append_patches(source, 0, src_bucket, split);
    append_patches(target, 1, tgt_bucket, split);
  } else {
    append_patches_flat(source, 0, spec, rng, split);
    append_patches_flat(target, 1, spec, rng, split);
  }
  return split;
}

double evaluate_accuracy(const DomainClassifier& net,
                         std::span<const LabeledPatch> patches) {
  if (patches.empty()) return 0.0;
  DomainClassifier::Trace trace;
  int correct = 0;
  for (const LabeledPatch& p : patches) {
    net.forward(to_classifier_input(*p.raster), trace);
    if (DomainClassifier::predict(trace) == p.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(patches.size());
}

TrainedClassifier train_classifier(const DataSplit& split, const TrainParams& hp,
                                   RngStream& rng) {
  if (split.train.empty()) throw ValidationError("train_classifier: empty training set");

  TrainedClassifier result;
  DomainClassifier net;
  net.init_weights(rng);

  auto tensors = net.param_tensors();
  std::vector<std::vector<double>> velocity;
  velocity.reserve(tensors.size());
  for (const auto& t : tensors) velocity.emplace_back(t.w->size(), 0.0);

  // Cache inputs once; training touches them epochs * n times.
  std::vector<std::vector<double>> inputs;
  inputs.reserve(split.train.size());
  for (const LabeledPatch& p : split.train) inputs.push_back(to_classifier_input(*p.raster));

  std::vector<int> order(split.train.size());
  std::iota(order.begin(), order.end(), 0);

  DomainClassifier::Trace trace;
  std::vector<std::vector<double>> best_weights;
  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    for (int i = static_cast<int>(order.size()) - 1; i > 0; --i) {
      std::swap(order[i], order[static_cast<std::size_t>(rng.uniform_int(0, i))]);
    }
    for (std::size_t start = 0; start < order.size(); start += hp.batch_size) {
      const std::size_t end = std::min(order.size(), start + hp.batch_size);
      const double inv_n = 1.0 / static_cast<double>(end - start);
      net.zero_grad();
      for (std::size_t i = start; i < end; ++i) {
        net.forward(inputs[order[i]], trace);
        net.backward(trace, split.train[order[i]].label);
      }
      for (std::size_t t = 0; t < tensors.size(); ++t) {
        std::vector<double>& w = *tensors[t].w;
        std::vector<double>& g = *tensors[t].g;
        std::vector<double>& v = velocity[t];
        for (std::size_t i = 0; i < w.size(); ++i) {
          v[i] = hp.momentum * v[i] + g[i] * inv_n;
          w[i] -= hp.lr * v[i];
        }
      }
    }
    const double val_acc = evaluate_accuracy(net, split.val);
    if (val_acc > result.best_val_accuracy || result.best_epoch < 0) {
      result.best_val_accuracy = val_acc;
      result.best_epoch = epoch;
      best_weights.clear();
      for (const auto& t : tensors) best_weights.push_back(*t.w);
    }
  }

  for (std::size_t t = 0; t < tensors.size(); ++t) *tensors[t].w = best_weights[t];
  result.net = std::move(net);
  return result;
}

double h_from_errors(double err_source, double err_target) {
  return std::clamp(2.0 * (1.0 - (err_source + err_target)), 0.0, 2.0);
}

DivergenceValue h_divergence(const DomainClassifier& net,
                             std::span<const LabeledPatch> test) {
  long long n_src = 0, n_tgt = 0, wrong_src = 0, wrong_tgt = 0;
  DomainClassifier::Trace trace;
  for (const LabeledPatch& p : test) {
    net.forward(to_classifier_input(*p.raster), trace);
    const bool wrong = DomainClassifier::predict(trace) != p.label;
    if (p.label == 0) {
      ++n_src;
      wrong_src += wrong;
    } else {
      ++n_tgt;
      wrong_tgt += wrong;
    }
  }
  if (n_src == 0 || n_tgt == 0) {
    throw EmptyTestSet("h_divergence: both domains must appear in the test set");
  }
  DivergenceValue v;
  v.err_source = static_cast<double>(wrong_src) / static_cast<double>(n_src);
  v.err_target = static_cast<double>(wrong_tgt) / static_cast<double>(n_tgt);
  v.d = h_from_errors(v.err_source, v.err_target);
  return v;
}

namespace {

RegionMeasurement measure_region(const PatchSet& source, const PatchSet& target,
                                 const SplitSpec& spec, const TrainParams& hp,
                                 RngStream& rng, std::vector<FeatureRow>* features) {
  DataSplit split = make_split(source, target, spec, rng);
  TrainedClassifier trained = train_classifier(split, hp, rng);

  RegionMeasurement m;
  m.divergence = h_divergence(trained.net, split.test);
  m.val_accuracy = trained.best_val_accuracy;
  m.best_epoch = trained.best_epoch;
  m.n_train = static_cast<int>(split.train.size());
  m.n_val = static_cast<int>(split.val.size());
  m.n_test = static_cast<int>(split.test.size());

  if (features) {
    DomainClassifier::Trace trace;
    for (const PatchSet* set : {&source, &target}) {
      int id = 0;
      for (const Patch& p : set->patches) {
        trained.net.forward(to_classifier_input(p.raster), trace);
        FeatureRow row;
        row.patch_id = id++;
        row.domain = set->domain;
        row.region = set->region;
        const auto& f = DomainClassifier::features(trace);
        std::copy(f.begin(), f.end(), row.values.begin());
        features->push_back(row);
      }
    }
  }
  return m;
}

}  // namespace

DivergenceReport gap_report(const PatchSet& fg_source, const PatchSet& fg_target,
                            const PatchSet& bg_source, const PatchSet& bg_target,
                            const SplitSpec& spec, const TrainParams& hp,
                            RngStream& rng, std::vector<FeatureRow>* features) {
  DivergenceReport report;
  report.split = spec;
  report.hp = hp;
  report.fg = measure_region(fg_source, fg_target, spec, hp, rng, features);
  report.bg = measure_region(bg_source, bg_target, spec, hp, rng, features);
  report.gap = std::abs(report.fg.divergence.d - report.bg.divergence.d);
  return report;
}

}  // namespace pastegen
