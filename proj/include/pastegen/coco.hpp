#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pastegen/raster.hpp"

namespace pastegen {

struct CocoImage {
  int id = 0;
  std::string file_name;
  int width = 0;
  int height = 0;
};

struct CocoAnnotation {
  int id = 0;
  int image_id = 0;
  int category_id = 0;
  BBox bbox;
};

struct CocoCategory {
  int id = 0;
  std::string name;
};

struct CocoDataset {
  std::vector<CocoImage> images;
  std::vector<CocoAnnotation> annotations;
  std::vector<CocoCategory> categories;
};

// Object-detection layout: images[], annotations[] (bbox [x,y,w,h], area,
// iscrowd=0), categories[] sorted by id. Key order is fixed so identical
// datasets serialize to identical bytes.
nlohmann::ordered_json coco_to_json(const CocoDataset& ds);
void write_coco_json(const std::filesystem::path& path, const CocoDataset& ds);
CocoDataset read_coco_json(const std::filesystem::path& path);

}  // namespace pastegen
