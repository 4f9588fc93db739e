#include "pastegen/raster.hpp"

namespace pastegen {

std::uint64_t pixel_hash(const Raster& img) {
  // FNV-1a over the raw RGB bytes.
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::uint8_t b : img.bytes()) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace pastegen
