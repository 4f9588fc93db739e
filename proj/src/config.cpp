#include "pastegen/config.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "pastegen/errors.hpp"

namespace pastegen {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& scope) {
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) {
      throw ParseError("unknown config field: " + scope + key);
    }
  }
}

std::filesystem::path resolve(const std::string& p, const std::filesystem::path& base) {
  std::filesystem::path path(p);
  if (path.is_absolute() || base.empty()) return path;
  return base / path;
}

SimplifySpec simplify_from_json(const json& j) {
  SimplifySpec spec;
  for (const auto& step : j) {
    SimplifyStep s;
    if (step.is_string()) {
      s.method = simplify_method_from_string(step.get<std::string>());
    } else if (step.is_object()) {
      reject_unknown_keys(step, {"method", "sigma"}, "simplify.");
      s.method = simplify_method_from_string(step.at("method").get<std::string>());
      if (step.contains("sigma")) s.sigma = step.at("sigma").get<double>();
    } else {
      throw ParseError("simplify steps must be strings or objects");
    }
    spec.steps.push_back(s);
  }
  return spec;
}

nlohmann::ordered_json simplify_to_json(const SimplifySpec& spec) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const SimplifyStep& s : spec.steps) {
    nlohmann::ordered_json step;
    step["method"] = to_string(s.method);
    if (s.method == SimplifyMethod::kGaussianBlur) step["sigma"] = s.sigma;
    arr.push_back(step);
  }
  return arr;
}

}  // namespace

GenerationConfig config_from_json(const nlohmann::json& j,
                                  const std::filesystem::path& base_dir) {
  GenerationConfig cfg;
  try {
    reject_unknown_keys(j, {"paths", "classes", "seeds_per_class", "n_images",
                            "resolution", "simplify", "diversify", "compose",
                            "global_seed", "workers", "run_name", "image_format",
                            "jpeg_quality", "dump_visible_masks"},
                        "");
    const json& paths = j.at("paths");
    reject_unknown_keys(paths, {"seeds", "backgrounds", "output", "variants"}, "paths.");
    cfg.seeds_dir = resolve(paths.at("seeds").get<std::string>(), base_dir);
    cfg.backgrounds_dir = resolve(paths.at("backgrounds").get<std::string>(), base_dir);
    cfg.output_dir = resolve(paths.at("output").get<std::string>(), base_dir);
    if (paths.contains("variants")) {
      cfg.variants_dir = resolve(paths.at("variants").get<std::string>(), base_dir);
    }
    cfg.classes = j.at("classes").get<std::vector<std::string>>();
    cfg.seeds_per_class = j.value("seeds_per_class", cfg.seeds_per_class);
    cfg.n_images = j.value("n_images", cfg.n_images);
    if (j.contains("resolution")) {
      const json& res = j.at("resolution");
      reject_unknown_keys(res, {"width", "height"}, "resolution.");
      cfg.width = res.at("width").get<int>();
      cfg.height = res.at("height").get<int>();
    }
    if (j.contains("simplify")) cfg.simplify = simplify_from_json(j.at("simplify"));
    if (j.contains("diversify")) {
      const json& d = j.at("diversify");
      reject_unknown_keys(d, {"variants_per_seed", "p_styled"}, "diversify.");
      cfg.variants_per_seed = d.value("variants_per_seed", cfg.variants_per_seed);
      cfg.p_styled = d.value("p_styled", cfg.p_styled);
    }
    if (j.contains("compose")) {
      const json& c = j.at("compose");
      reject_unknown_keys(c, {"objects_per_image", "scale_range", "rotation_range",
                              "occ_prob", "blend_modes", "feather_sigma",
                              "min_visible_fraction", "min_box_filter", "min_box",
                              "full_extent_boxes"},
                          "compose.");
      if (c.contains("objects_per_image")) {
        cfg.compose.min_objects = c.at("objects_per_image").at(0).get<int>();
        cfg.compose.max_objects = c.at("objects_per_image").at(1).get<int>();
      }
      if (c.contains("scale_range")) {
        cfg.compose.scale_min = c.at("scale_range").at(0).get<double>();
        cfg.compose.scale_max = c.at("scale_range").at(1).get<double>();
      }
      if (c.contains("rotation_range")) {
        cfg.compose.rotation_min_deg = c.at("rotation_range").at(0).get<double>();
        cfg.compose.rotation_max_deg = c.at("rotation_range").at(1).get<double>();
      }
      cfg.compose.occ_prob = c.value("occ_prob", cfg.compose.occ_prob);
      if (c.contains("blend_modes")) {
        cfg.compose.blend_modes.clear();
        for (const auto& m : c.at("blend_modes")) {
          cfg.compose.blend_modes.push_back(blend_mode_from_string(m.get<std::string>()));
        }
      }
      cfg.compose.feather_sigma = c.value("feather_sigma", cfg.compose.feather_sigma);
      cfg.compose.min_visible_fraction =
          c.value("min_visible_fraction", cfg.compose.min_visible_fraction);
      cfg.compose.min_box_filter = c.value("min_box_filter", cfg.compose.min_box_filter);
      if (c.contains("min_box")) {
        cfg.compose.min_box_w = c.at("min_box").at(0).get<int>();
        cfg.compose.min_box_h = c.at("min_box").at(1).get<int>();
      }
      cfg.compose.full_extent_boxes =
          c.value("full_extent_boxes", cfg.compose.full_extent_boxes);
    }
    cfg.global_seed = j.value("global_seed", cfg.global_seed);
    cfg.workers = j.value("workers", cfg.workers);
    cfg.run_name = j.value("run_name", cfg.run_name);
    cfg.image_format = j.value("image_format", cfg.image_format);
    cfg.jpeg_quality = j.value("jpeg_quality", cfg.jpeg_quality);
    cfg.dump_visible_masks = j.value("dump_visible_masks", cfg.dump_visible_masks);
  } catch (const json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  validate_config(cfg);
  return cfg;
}

GenerationConfig parse_config(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open config " + file.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("config " + file.string() + ": " + e.what());
  }
  return config_from_json(j, file.has_parent_path() ? file.parent_path()
                                                    : std::filesystem::path());
}

nlohmann::ordered_json config_to_json(const GenerationConfig& cfg) {
  nlohmann::ordered_json j;
  j["paths"]["seeds"] = cfg.seeds_dir.string();
  j["paths"]["backgrounds"] = cfg.backgrounds_dir.string();
  j["paths"]["output"] = cfg.output_dir.string();
  if (!cfg.variants_dir.empty()) j["paths"]["variants"] = cfg.variants_dir.string();
  j["classes"] = cfg.classes;
  j["seeds_per_class"] = cfg.seeds_per_class;
  j["n_images"] = cfg.n_images;
  j["resolution"]["width"] = cfg.width;
  j["resolution"]["height"] = cfg.height;
  j["simplify"] = simplify_to_json(cfg.simplify);
  j["diversify"]["variants_per_seed"] = cfg.variants_per_seed;
  j["diversify"]["p_styled"] = cfg.p_styled;
  nlohmann::ordered_json c;
  c["objects_per_image"] = {cfg.compose.min_objects, cfg.compose.max_objects};
  c["scale_range"] = {cfg.compose.scale_min, cfg.compose.scale_max};
  c["rotation_range"] = {cfg.compose.rotation_min_deg, cfg.compose.rotation_max_deg};
  c["occ_prob"] = cfg.compose.occ_prob;
  nlohmann::ordered_json modes = nlohmann::ordered_json::array();
  for (BlendMode m : cfg.compose.blend_modes) modes.push_back(to_string(m));
  c["blend_modes"] = modes;
  c["feather_sigma"] = cfg.compose.feather_sigma;
  c["min_visible_fraction"] = cfg.compose.min_visible_fraction;
  c["min_box_filter"] = cfg.compose.min_box_filter;
  c["min_box"] = {cfg.compose.min_box_w, cfg.compose.min_box_h};
  c["full_extent_boxes"] = cfg.compose.full_extent_boxes;
  j["compose"] = c;
  j["global_seed"] = cfg.global_seed;
  j["workers"] = cfg.workers;
  j["run_name"] = cfg.run_name;
  j["image_format"] = cfg.image_format;
  j["jpeg_quality"] = cfg.jpeg_quality;
  j["dump_visible_masks"] = cfg.dump_visible_masks;
  return j;
}

void validate_config(const GenerationConfig& cfg) {
  auto fail = [](const std::string& msg) { throw ValidationError(msg); };
  if (!std::filesystem::is_directory(cfg.seeds_dir)) {
    fail("paths.seeds: not an existing directory: " + cfg.seeds_dir.string());
  }
  if (!std::filesystem::is_directory(cfg.backgrounds_dir)) {
    fail("paths.backgrounds: not an existing directory: " + cfg.backgrounds_dir.string());
  }
  if (!cfg.variants_dir.empty() && !std::filesystem::is_directory(cfg.variants_dir)) {
    fail("paths.variants: not an existing directory: " + cfg.variants_dir.string());
  }
  if (cfg.output_dir.empty()) fail("paths.output: must not be empty");
  if (cfg.classes.empty()) fail("classes: at least one class is required");
  if (cfg.seeds_per_class < 0) fail("seeds_per_class: must be >= 0");
  if (cfg.n_images < 1) fail("n_images: must be >= 1");
  if (cfg.width < 1 || cfg.height < 1) fail("resolution: must be >= 1x1");
  for (const SimplifyStep& s : cfg.simplify.steps) {
    if (s.method == SimplifyMethod::kGaussianBlur && s.sigma <= 0.0) {
      fail("simplify.sigma: must be > 0 for gaussian_blur");
    }
  }
  if (cfg.variants_per_seed < 0) fail("diversify.variants_per_seed: must be >= 0");
  if (cfg.p_styled < 0.0 || cfg.p_styled > 1.0) {
    fail("diversify.p_styled: must be in [0,1]");
  }
  const ComposeParams& c = cfg.compose;
  if (c.min_objects < 0 || c.max_objects < c.min_objects) {
    fail("compose.objects_per_image: need 0 <= min <= max");
  }
  if (c.scale_min <= 0.0 || c.scale_max < c.scale_min) {
    fail("compose.scale_range: need 0 < min <= max");
  }
  if (c.rotation_max_deg < c.rotation_min_deg) {
    fail("compose.rotation_range: need min <= max");
  }
  if (c.occ_prob < 0.0 || c.occ_prob > 1.0) fail("compose.occ_prob: must be in [0,1]");
  if (c.blend_modes.empty()) fail("compose.blend_modes: at least one mode");
  if (c.feather_sigma < 0.0) fail("compose.feather_sigma: must be >= 0");
  if (c.min_visible_fraction <= 0.0 || c.min_visible_fraction > 1.0) {
    fail("compose.min_visible_fraction: must be in (0,1]");
  }
  if (c.min_box_w < 1 || c.min_box_h < 1) fail("compose.min_box: must be >= 1x1");
  if (cfg.workers < 1) fail("workers: must be >= 1");
  if (cfg.run_name.empty()) fail("run_name: must not be empty");
  if (cfg.image_format != "png" && cfg.image_format != "jpg") {
    fail("image_format: must be 'png' or 'jpg'");
  }
  if (cfg.jpeg_quality < 1 || cfg.jpeg_quality > 100) {
    fail("jpeg_quality: must be in [1,100]");
  }
}

}  // namespace pastegen
