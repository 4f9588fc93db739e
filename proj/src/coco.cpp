#include "pastegen/coco.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "pastegen/errors.hpp"

namespace pastegen {

nlohmann::ordered_json coco_to_json(const CocoDataset& ds) {
  nlohmann::ordered_json j;
  j["images"] = nlohmann::ordered_json::array();
  for (const CocoImage& im : ds.images) {
    j["images"].push_back({{"id", im.id},
                           {"file_name", im.file_name},
                           {"width", im.width},
                           {"height", im.height}});
  }
  j["annotations"] = nlohmann::ordered_json::array();
  for (const CocoAnnotation& a : ds.annotations) {
    j["annotations"].push_back({{"id", a.id},
                                {"image_id", a.image_id},
                                {"category_id", a.category_id},
                                {"bbox", {a.bbox.x, a.bbox.y, a.bbox.w, a.bbox.h}},
                                {"area", a.bbox.area()},
                                {"iscrowd", 0}});
  }
  std::vector<CocoCategory> cats = ds.categories;
  std::sort(cats.begin(), cats.end(),
            [](const CocoCategory& a, const CocoCategory& b) { return a.id < b.id; });
  j["categories"] = nlohmann::ordered_json::array();
  for (const CocoCategory& c : cats) {
    j["categories"].push_back({{"id", c.id}, {"name", c.name}});
  }
  return j;
}

void write_coco_json(const std::filesystem::path& path, const CocoDataset& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << coco_to_json(ds).dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

CocoDataset read_coco_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("invalid JSON in " + path.string() + ": " + e.what());
  }
  CocoDataset ds;
  try {
    for (const auto& im : j.at("images")) {
      ds.images.push_back({im.at("id").get<int>(), im.at("file_name").get<std::string>(),
                           im.at("width").get<int>(), im.at("height").get<int>()});
    }
    for (const auto& a : j.value("annotations", nlohmann::json::array())) {
      const auto& b = a.at("bbox");
      CocoAnnotation ann;
      ann.id = a.at("id").get<int>();
      ann.image_id = a.at("image_id").get<int>();
      ann.category_id = a.at("category_id").get<int>();
      ann.bbox = {static_cast<int>(std::llround(b.at(0).get<double>())),
                  static_cast<int>(std::llround(b.at(1).get<double>())),
                  static_cast<int>(std::llround(b.at(2).get<double>())),
                  static_cast<int>(std::llround(b.at(3).get<double>()))};
      ds.annotations.push_back(ann);
    }
    for (const auto& c : j.value("categories", nlohmann::json::array())) {
      ds.categories.push_back({c.at("id").get<int>(), c.at("name").get<std::string>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("bad annotation schema in " + path.string() + ": " + e.what());
  }
  return ds;
}

}  // namespace pastegen
