#include "pastegen/runner.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "pastegen/coco.hpp"
#include "pastegen/errors.hpp"
#include "pastegen/filters.hpp"
#include "pastegen/geometry.hpp"
#include "pastegen/imageio.hpp"
#include "pastegen/maskproc.hpp"

namespace pastegen {

std::uint64_t variant_stream_index(int class_index, int seed_index) {
  return kVariantStreamBase + static_cast<std::uint64_t>(class_index) * 1'000'000ull +
         static_cast<std::uint64_t>(seed_index);
}

namespace {

struct RawSeed {
  Raster image;
  AlphaMask mask;  // hole-filled, full frame
  BBox crop;       // tight extent of the mask
};

SeedInstance crop_instance(const Raster& img, const AlphaMask& mask, const BBox& box,
                           int class_id) {
  SeedInstance inst;
  inst.raster = Raster(box.w, box.h);
  inst.mask = AlphaMask(box.w, box.h);
  for (int y = 0; y < box.h; ++y) {
    for (int x = 0; x < box.w; ++x) {
      const std::uint8_t* s = img.px(box.x + x, box.y + y);
      std::uint8_t* d = inst.raster.px(x, y);
      d[0] = s[0];
      d[1] = s[1];
      d[2] = s[2];
      inst.mask.at(x, y) = mask.at(box.x + x, box.y + y);
    }
  }
  inst.class_id = class_id;
  return inst;
}

bool is_mask_file(const std::filesystem::path& p) {
  return p.stem().string().ends_with("_mask");
}

AlphaMask seed_mask_for(const std::filesystem::path& image_path,
                        const LoadedImage& loaded) {
  for (const char* ext : {".png", ".jpg", ".jpeg"}) {
    std::filesystem::path candidate = image_path;
    candidate.replace_filename(image_path.stem().string() + "_mask" + ext);
    if (std::filesystem::exists(candidate)) return load_mask(candidate);
  }
  if (loaded.alpha) return *loaded.alpha;
  throw ValidationError("seed image has neither a _mask file nor an alpha channel: " +
                        image_path.string());
}

}  // namespace

SeedPools load_seed_pools(const GenerationConfig& cfg, std::ostream& log) {
  SeedPools pools;
  pools.p_styled = cfg.p_styled;

  for (int ci = 0; ci < static_cast<int>(cfg.classes.size()); ++ci) {
    const std::string& name = cfg.classes[ci];
    const std::filesystem::path class_dir = cfg.seeds_dir / name;
    if (!std::filesystem::is_directory(class_dir)) {
      throw ValidationError("classes: no seed directory for class '" + name +
                            "' under " + cfg.seeds_dir.string());
    }
    std::vector<std::filesystem::path> files;
    for (const auto& f : list_image_files(class_dir)) {
      if (!is_mask_file(f)) files.push_back(f);
    }
    if (cfg.seeds_per_class > 0 &&
        static_cast<int>(files.size()) > cfg.seeds_per_class) {
      files.resize(cfg.seeds_per_class);
    }
    if (files.empty()) {
      throw ValidationError("classes: no seed images for class '" + name + "'");
    }

    std::vector<RawSeed> raws;
    for (const auto& f : files) {
      LoadedImage loaded = load_image(f);
      AlphaMask mask = seed_mask_for(f, loaded);
      if (mask.width() != loaded.rgb.width() || mask.height() != loaded.rgb.height()) {
        throw ValidationError("mask dimensions do not match seed image: " + f.string());
      }
      mask = fill_holes(mask);
      BBox crop;
      try {
        crop = tight_bbox(mask);
      } catch (const EmptyMask&) {
        throw ValidationError("seed mask is empty: " + f.string());
      }
      raws.push_back({std::move(loaded.rgb), std::move(mask), crop});
    }

    std::vector<std::size_t> original_index;
    for (const RawSeed& raw : raws) {
      original_index.push_back(pools.originals.size());
      pools.originals.push_back(crop_instance(raw.image, raw.mask, raw.crop, ci));
    }

    if (!cfg.variants_dir.empty()) {
      const std::filesystem::path vdir = cfg.variants_dir / name;
      if (!std::filesystem::is_directory(vdir)) {
        log << "warn: no variants directory for class '" << name << "'\n";
        continue;
      }
      for (const auto& f : list_image_files(vdir)) {
        LoadedImage v = load_image(f);
        // Pair each variant with the first seed of matching dimensions; the
        // variant reuses that seed's mask.
        const RawSeed* match = nullptr;
        for (const RawSeed& raw : raws) {
          if (raw.image.width() == v.rgb.width() &&
              raw.image.height() == v.rgb.height()) {
            match = &raw;
            break;
          }
        }
        if (!match) {
          log << "warn: variant " << f.string()
              << " matches no seed dimensions for class '" << name << "', skipped\n";
          continue;
        }
        SeedInstance inst = crop_instance(v.rgb, match->mask, match->crop, ci);
        inst.provenance = Provenance::kStyled;
        pools.styled.push_back(std::move(inst));
      }
    } else if (cfg.variants_per_seed > 0) {
      for (std::size_t j = 0; j < raws.size(); ++j) {
        RngStream rng(cfg.global_seed, variant_stream_index(ci, static_cast<int>(j)));
        auto variants =
            make_variants(pools.originals[original_index[j]], cfg.variants_per_seed, rng);
        for (auto& v : variants) pools.styled.push_back(std::move(v));
      }
    }
  }

  if (pools.originals.empty()) throw ValidationError("no seed instances loaded");
  if (pools.p_styled > 0.0 && pools.styled.empty()) {
    throw ValidationError(
        "diversify.p_styled: > 0 but the styled pool is empty "
        "(set variants_per_seed or provide a variants directory)");
  }
  return pools;
}

namespace {

struct ImageJob {
  bool ok = false;
  std::string file_name;
  std::uint64_t stream_index = 0;
  std::uint64_t hash = 0;
  int background_index = -1;
  int skipped = 0;
  std::vector<Annotation> annotations;
  std::vector<PlacementRecord> placements;
  std::string error;
};

std::string image_file_name(const GenerationConfig& cfg, int index) {
  std::ostringstream name;
  name << cfg.run_name << '_' << std::setw(6) << std::setfill('0') << index << '.'
       << (cfg.image_format == "jpg" ? "jpg" : "png");
  return name.str();
}

std::string hash_hex(std::uint64_t h) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << h;
  return s.str();
}

// One image end to end; everything below is a pure function of the
// per-image stream, so worker scheduling cannot change the output.
SceneResult compose_for_index(const GenerationConfig& cfg, const SeedPools& pools,
                              const std::vector<std::filesystem::path>& backgrounds,
                              int index, ImageJob& job) {
  RngStream rng(cfg.global_seed, kImageStreamBase + static_cast<std::uint64_t>(index));
  job.stream_index = kImageStreamBase + static_cast<std::uint64_t>(index);
  job.background_index = rng.uniform_int(0, static_cast<int>(backgrounds.size()) - 1);

  Raster bg = load_image(backgrounds[job.background_index]).rgb;
  bg = resize_bilinear(bg, cfg.width, cfg.height);
  bg = simplify_background(bg, cfg.simplify);
  return compose_scene(bg, pools, cfg.compose, rng);
}

void write_owner_dump(const std::filesystem::path& path, const SceneResult& scene,
                      int width, int height) {
  // 0 = background; placements cycle through 1..255.
  std::vector<std::uint8_t> gray(scene.owner.size());
  for (std::size_t i = 0; i < scene.owner.size(); ++i) {
    gray[i] = scene.owner[i] < 0 ? 0 : static_cast<std::uint8_t>(scene.owner[i] % 255 + 1);
  }
  save_png_gray(path, gray, width, height);
}

nlohmann::ordered_json manifest_json(const GenerationConfig& cfg,
                                     const std::vector<ImageJob>& jobs) {
  nlohmann::ordered_json m;
  m["tool"] = kToolName;
  m["version"] = kToolVersion;
  m["global_seed"] = cfg.global_seed;
  m["config"] = config_to_json(cfg);
  nlohmann::ordered_json images = nlohmann::ordered_json::array();
  int total_skipped = 0;
  int failed = 0;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const ImageJob& job = jobs[i];
    nlohmann::ordered_json entry;
    entry["index"] = i;
    entry["stream_index"] = job.stream_index;
    if (job.ok) {
      entry["file"] = job.file_name;
      entry["background_index"] = job.background_index;
      entry["pixel_hash"] = hash_hex(job.hash);
      entry["skipped_instances"] = job.skipped;
      total_skipped += job.skipped;
    } else {
      entry["error"] = job.error;
      ++failed;
    }
    images.push_back(entry);
  }
  m["images"] = images;
  m["total_skipped_instances"] = total_skipped;
  m["failed_images"] = failed;
  return m;
}

}  // namespace

RunStats run_generate(const GenerationConfig& cfg, std::ostream& log) {
  validate_config(cfg);
  const std::filesystem::path images_dir = cfg.output_dir / "images";
  std::filesystem::create_directories(images_dir);
  if (cfg.dump_visible_masks) {
    std::filesystem::create_directories(cfg.output_dir / "masks");
  }

  SeedPools pools = load_seed_pools(cfg, log);
  std::vector<std::filesystem::path> backgrounds = list_image_files(cfg.backgrounds_dir);
  if (backgrounds.empty()) {
    throw ValidationError("paths.backgrounds: no images found in " +
                          cfg.backgrounds_dir.string());
  }

  std::vector<ImageJob> jobs(cfg.n_images);
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= cfg.n_images) return;
      ImageJob& job = jobs[i];
      try {
        SceneResult scene = compose_for_index(cfg, pools, backgrounds, i, job);
        job.file_name = image_file_name(cfg, i);
        const std::filesystem::path out = images_dir / job.file_name;
        if (cfg.image_format == "jpg") {
          save_jpeg(out, scene.image, cfg.jpeg_quality);
        } else {
          save_png(out, scene.image);
        }
        if (cfg.dump_visible_masks) {
          write_owner_dump(cfg.output_dir / "masks" / (job.file_name + ".owner.png"),
                           scene, cfg.width, cfg.height);
        }
        job.hash = pixel_hash(scene.image);
        job.skipped = scene.skipped;
        job.annotations = std::move(scene.annotations);
        job.ok = true;
      } catch (const std::exception& e) {
        job.ok = false;
        job.error = e.what();
      }
    }
  };

  const int n_threads = std::max(1, std::min(cfg.workers, cfg.n_images));
  std::vector<std::thread> threads;
  threads.reserve(n_threads);
  for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();

  // Annotations assembled in image-index order regardless of completion order.
  CocoDataset coco;
  for (int ci = 0; ci < static_cast<int>(cfg.classes.size()); ++ci) {
    coco.categories.push_back({ci + 1, cfg.classes[ci]});
  }
  int ann_id = 1;
  RunStats stats;
  for (int i = 0; i < cfg.n_images; ++i) {
    const ImageJob& job = jobs[i];
    if (!job.ok) {
      log << "warn: image " << i << " failed: " << job.error << '\n';
      ++stats.images_failed;
      continue;
    }
    ++stats.images_written;
    stats.instances_skipped += job.skipped;
    coco.images.push_back({i + 1, job.file_name, cfg.width, cfg.height});
    for (const Annotation& a : job.annotations) {
      coco.annotations.push_back({ann_id++, i + 1, a.class_id + 1, a.box});
    }
  }
  write_coco_json(cfg.output_dir / "annotations.json", coco);

  std::ofstream mf(cfg.output_dir / "manifest.json", std::ios::binary);
  if (!mf) throw IoError("cannot write manifest under " + cfg.output_dir.string());
  mf << manifest_json(cfg, jobs).dump(2) << '\n';

  return stats;
}

namespace {

void burn_box(Raster& img, const BBox& box) {
  constexpr std::uint8_t kR = 255, kG = 32, kB = 32;
  auto mark = [&](int x, int y) {
    if (!img.in_bounds(x, y)) return;
    std::uint8_t* d = img.px(x, y);
    d[0] = kR;
    d[1] = kG;
    d[2] = kB;
  };
  for (int t = 0; t < 2; ++t) {
    for (int x = box.x; x < box.right(); ++x) {
      mark(x, box.y + t);
      mark(x, box.bottom() - 1 - t);
    }
    for (int y = box.y; y < box.bottom(); ++y) {
      mark(box.x + t, y);
      mark(box.right() - 1 - t, y);
    }
  }
}

}  // namespace

RunStats run_preview(const GenerationConfig& cfg, int k,
                     const std::filesystem::path& out_file, std::ostream& log) {
  validate_config(cfg);
  if (k < 1) throw ValidationError("preview: k must be >= 1");

  SeedPools pools = load_seed_pools(cfg, log);
  std::vector<std::filesystem::path> backgrounds = list_image_files(cfg.backgrounds_dir);
  if (backgrounds.empty()) {
    throw ValidationError("paths.backgrounds: no images found in " +
                          cfg.backgrounds_dir.string());
  }

  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(k))));
  const int rows = (k + cols - 1) / cols;
  Raster sheet(cols * cfg.width, rows * cfg.height, 24);

  RunStats stats;
  for (int i = 0; i < k; ++i) {
    ImageJob job;
    SceneResult scene = compose_for_index(cfg, pools, backgrounds, i, job);
    stats.instances_skipped += scene.skipped;
    ++stats.images_written;

    for (const Annotation& a : scene.annotations) burn_box(scene.image, a.box);

    const int ox = (i % cols) * cfg.width;
    const int oy = (i / cols) * cfg.height;
    for (int y = 0; y < cfg.height; ++y) {
      for (int x = 0; x < cfg.width; ++x) {
        const std::uint8_t* s = scene.image.px(x, y);
        std::uint8_t* d = sheet.px(ox + x, oy + y);
        d[0] = s[0];
        d[1] = s[1];
        d[2] = s[2];
      }
    }

    log << "image " << i << ": " << scene.placements.size() << " placed, "
        << scene.skipped << " skipped\n";
    for (const PlacementRecord& p : scene.placements) {
      log << "  class=" << cfg.classes[p.class_id]
          << " provenance=" << (p.provenance == Provenance::kStyled ? "styled" : "original")
          << " scale=" << p.scale << " rot=" << p.rotation_deg << " pos=(" << p.x << ','
          << p.y << ")" << " blend=" << to_string(p.blend_mode)
          << " near_previous=" << (p.near_previous ? "true" : "false") << " box=("
          << p.placed_box.x << ',' << p.placed_box.y << ',' << p.placed_box.w << ','
          << p.placed_box.h << ")\n";
    }
  }

  save_png(out_file, sheet);
  return stats;
}

namespace {

struct LoadedSet {
  std::vector<AnnotatedImage> images;  // annotated mode
  std::vector<Patch> fg_patches;       // patch-dir mode
  std::vector<Patch> bg_patches;
  bool annotated = false;
};

std::vector<Patch> load_patch_dir(const std::filesystem::path& dir) {
  std::vector<Patch> patches;
  int scene = 0;
  for (const auto& f : list_image_files(dir)) {
    LoadedImage img = load_image(f);
    if (img.rgb.width() != DomainClassifier::kIn ||
        img.rgb.height() != DomainClassifier::kIn) {
      throw ValidationError("patch is not 32x32: " + f.string());
    }
    patches.push_back({std::move(img.rgb), scene++});
  }
  return patches;
}

LoadedSet load_gapmeter_set(const std::filesystem::path& dir) {
  LoadedSet set;
  const std::filesystem::path ann = dir / "annotations.json";
  if (std::filesystem::exists(ann)) {
    set.annotated = true;
    CocoDataset coco = read_coco_json(ann);
    for (const CocoImage& im : coco.images) {
      std::filesystem::path p = dir / im.file_name;
      if (!std::filesystem::exists(p)) p = dir / "images" / im.file_name;
      if (!std::filesystem::exists(p)) {
        throw IoError("annotated image not found: " + im.file_name + " under " +
                      dir.string());
      }
      AnnotatedImage a;
      a.image = load_image(p).rgb;
      a.scene_id = im.id;
      for (const CocoAnnotation& c : coco.annotations) {
        if (c.image_id == im.id) a.boxes.push_back(c.bbox);
      }
      set.images.push_back(std::move(a));
    }
    return set;
  }
  const std::filesystem::path fg = dir / "foreground";
  const std::filesystem::path bg = dir / "background";
  if (!std::filesystem::is_directory(fg) || !std::filesystem::is_directory(bg)) {
    throw ValidationError(
        dir.string() +
        ": expected annotations.json or foreground/ and background/ patch dirs");
  }
  set.fg_patches = load_patch_dir(fg);
  set.bg_patches = load_patch_dir(bg);
  return set;
}

PatchSet patches_for(const LoadedSet& set, Domain domain, Region region, int n,
                     RngStream& rng) {
  if (set.annotated) {
    return extract_patches(set.images, domain, region, n, rng);
  }
  PatchSet out;
  out.domain = domain;
  out.region = region;
  out.patches = region == Region::kForeground ? set.fg_patches : set.bg_patches;
  if (out.patches.empty()) {
    throw InsufficientRegion("no " + to_string(region) + " patches in patch set");
  }
  if (n > 0 && static_cast<int>(out.patches.size()) > n) out.patches.resize(n);
  return out;
}

// HalfGAN-style restyle of extracted foreground patches: half of them get a
// random lighting style, the whole patch treated as masked.
PatchSet restyle_half(const PatchSet& in, double p_styled, RngStream& rng) {
  PatchSet out = in;
  AlphaMask full(DomainClassifier::kIn, DomainClassifier::kIn, 1.0f);
  for (Patch& p : out.patches) {
    if (!rng.bernoulli(p_styled)) continue;
    StyleParams params = draw_style_params(rng);
    p.raster = tone_shift(spotlight(p.raster, full, params), full, params);
  }
  return out;
}

PatchSet simplify_patches(const PatchSet& in, const SimplifySpec& spec) {
  PatchSet out = in;
  for (Patch& p : out.patches) p.raster = simplify_background(p.raster, spec);
  return out;
}

nlohmann::ordered_json measurement_json(const RegionMeasurement& m) {
  nlohmann::ordered_json j;
  j["d"] = m.divergence.d;
  j["err_source"] = m.divergence.err_source;
  j["err_target"] = m.divergence.err_target;
  j["val_accuracy"] = m.val_accuracy;
  j["best_epoch"] = m.best_epoch;
  j["n_train"] = m.n_train;
  j["n_val"] = m.n_val;
  j["n_test"] = m.n_test;
  return j;
}

nlohmann::ordered_json report_row_json(const DivergenceReport& r) {
  nlohmann::ordered_json j;
  j["fg"] = measurement_json(r.fg);
  j["bg"] = measurement_json(r.bg);
  j["gap"] = r.gap;
  return j;
}

void write_features_csv(const std::filesystem::path& path,
                        const std::vector<FeatureRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "patch_id,domain,region";
  for (int i = 0; i < DomainClassifier::kFc2; ++i) out << ",f" << i;
  out << '\n';
  for (const FeatureRow& r : rows) {
    out << r.patch_id << ',' << to_string(r.domain) << ',' << to_string(r.region);
    for (double v : r.values) out << ',' << v;
    out << '\n';
  }
}

}  // namespace

void run_gapmeter(const GapmeterOptions& opts, std::ostream& log) {
  LoadedSet source = load_gapmeter_set(opts.source_dir);
  LoadedSet target = load_gapmeter_set(opts.target_dir);

  RngStream rng(opts.seed, 0);
  PatchSet fg_src = patches_for(source, Domain::kSource, Region::kForeground,
                                opts.n_patches, rng);
  PatchSet bg_src = patches_for(source, Domain::kSource, Region::kBackground,
                                opts.n_patches, rng);
  PatchSet fg_tgt = patches_for(target, Domain::kTarget, Region::kForeground,
                                opts.n_patches, rng);
  PatchSet bg_tgt = patches_for(target, Domain::kTarget, Region::kBackground,
                                opts.n_patches, rng);

  std::vector<FeatureRow> features;
  std::vector<FeatureRow>* features_ptr =
      opts.features_file.empty() ? nullptr : &features;

  nlohmann::ordered_json out;
  if (opts.before_after) {
    DivergenceReport before =
        gap_report(fg_src, fg_tgt, bg_src, bg_tgt, opts.split, opts.hp, rng, features_ptr);
    PatchSet fg_after = restyle_half(fg_src, opts.after_p_styled, rng);
    PatchSet bg_after = simplify_patches(bg_src, opts.after_simplify);
    DivergenceReport after =
        gap_report(fg_after, fg_tgt, bg_after, bg_tgt, opts.split, opts.hp, rng, nullptr);
    out["before"] = report_row_json(before);
    out["after"] = report_row_json(after);
    out["gap_delta"] = before.gap - after.gap;
    log << "before: d_fg=" << before.fg.divergence.d << " d_bg=" << before.bg.divergence.d
        << " gap=" << before.gap << '\n';
    log << "after:  d_fg=" << after.fg.divergence.d << " d_bg=" << after.bg.divergence.d
        << " gap=" << after.gap << '\n';
  } else {
    DivergenceReport report =
        gap_report(fg_src, fg_tgt, bg_src, bg_tgt, opts.split, opts.hp, rng, features_ptr);
    out = report_row_json(report);
    log << "d_fg=" << report.fg.divergence.d << " d_bg=" << report.bg.divergence.d
        << " gap=" << report.gap << '\n';
  }
  out["split"] = {{"train", opts.split.train_fraction},
                  {"val", opts.split.val_fraction},
                  {"test", opts.split.test_fraction},
                  {"scene_disjoint", opts.split.scene_disjoint}};
  out["hp"] = {{"lr", opts.hp.lr},
               {"momentum", opts.hp.momentum},
               {"batch_size", opts.hp.batch_size},
               {"epochs", opts.hp.epochs}};
  out["seed"] = opts.seed;

  if (!opts.out_file.empty()) {
    std::ofstream f(opts.out_file, std::ios::binary);
    if (!f) throw IoError("cannot open " + opts.out_file.string() + " for writing");
    f << out.dump(2) << '\n';
  } else {
    log << out.dump(2) << '\n';
  }
  if (features_ptr) write_features_csv(opts.features_file, features);
}

}  // namespace pastegen
