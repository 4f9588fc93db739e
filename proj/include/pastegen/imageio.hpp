#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "pastegen/raster.hpp"

namespace pastegen {

struct LoadedImage {
  Raster rgb;
  std::optional<AlphaMask> alpha;  // present when the file carried alpha
};

// PNG or JPEG, detected by magic bytes. Throws IoError.
LoadedImage load_image(const std::filesystem::path& path);

// Single-channel mask file, values scaled to [0,1].
AlphaMask load_mask(const std::filesystem::path& path);

void save_png(const std::filesystem::path& path, const Raster& img);
void save_png_gray(const std::filesystem::path& path,
                   const std::vector<std::uint8_t>& pixels, int width, int height);
void save_jpeg(const std::filesystem::path& path, const Raster& img, int quality = 95);

// Sorted list of *.png / *.jpg / *.jpeg in a directory (non-recursive).
std::vector<std::filesystem::path> list_image_files(const std::filesystem::path& dir);

}  // namespace pastegen
