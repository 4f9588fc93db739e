#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pastegen/compose.hpp"
#include "pastegen/simplify.hpp"

namespace pastegen {

// Full declarative description of a generation run. Everything except the
// three required paths and the class list has a default.
struct GenerationConfig {
  std::filesystem::path seeds_dir;
  std::filesystem::path backgrounds_dir;
  std::filesystem::path output_dir;
  std::filesystem::path variants_dir;  // optional: pre-styled variants

  std::vector<std::string> classes;
  int seeds_per_class = 0;  // 0 = use every seed found

  int n_images = 1;
  int width = 640;
  int height = 480;

  SimplifySpec simplify;

  int variants_per_seed = 8;
  double p_styled = 0.5;

  ComposeParams compose;

  std::uint64_t global_seed = 0;
  int workers = 1;
  std::string run_name = "synth";
  std::string image_format = "png";  // "png" (lossless) or "jpg"
  int jpeg_quality = 95;
  bool dump_visible_masks = false;

  bool operator==(const GenerationConfig&) const = default;
};

// Parse + validate a JSON config file. Relative paths resolve against the
// config file's directory. Throws ParseError on malformed input and
// ValidationError naming the violated field.
GenerationConfig parse_config(const std::filesystem::path& file);
GenerationConfig config_from_json(const nlohmann::json& j,
                                  const std::filesystem::path& base_dir);
nlohmann::ordered_json config_to_json(const GenerationConfig& cfg);
void validate_config(const GenerationConfig& cfg);

}  // namespace pastegen
