#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pastegen/geometry.hpp"
#include "pastegen/rng.hpp"

using namespace pastegen;

namespace {

// Pixel-counting oracle over a bounded grid.
double iou_oracle(const BBox& a, const BBox& b, int grid) {
  long long inter = 0, uni = 0;
  for (int y = 0; y < grid; ++y) {
    for (int x = 0; x < grid; ++x) {
      bool in_a = a.contains(x, y);
      bool in_b = b.contains(x, y);
      inter += in_a && in_b;
      uni += in_a || in_b;
    }
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / uni;
}

BBox random_box(RngStream& rng, int grid) {
  int w = rng.uniform_int(1, grid / 2);
  int h = rng.uniform_int(1, grid / 2);
  int x = rng.uniform_int(0, grid - w);
  int y = rng.uniform_int(0, grid - h);
  return {x, y, w, h};
}

}  // namespace

TEST_CASE("iou identity and disjoint cases") {
  BBox a{0, 0, 10, 10};
  CHECK(iou(a, a) == doctest::Approx(1.0));
  CHECK(iou({0, 0, 10, 10}, {20, 20, 5, 5}) == doctest::Approx(0.0));
}

TEST_CASE("iou half-overlap matches the pixel-counting oracle") {
  BBox a{0, 0, 10, 10};
  BBox b{5, 0, 10, 10};
  // intersection 50, union 150
  CHECK(iou(a, b) == doctest::Approx(1.0 / 3.0));
  CHECK(iou(a, b) == doctest::Approx(iou_oracle(a, b, 20)));
}

TEST_CASE("iou properties over random boxes") {
  RngStream rng(7, 0);
  for (int i = 0; i < 500; ++i) {
    BBox a = random_box(rng, 40);
    BBox b = random_box(rng, 40);
    double v = iou(a, b);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(v == doctest::Approx(iou(b, a)));
    CHECK(v == doctest::Approx(iou_oracle(a, b, 40)));
    if (a == b) {
      CHECK(v == doctest::Approx(1.0));
    }
    if (v == 1.0) {
      CHECK(a == b);
    }
  }
}

TEST_CASE("tight_bbox full frame and single pixel") {
  AlphaMask full(8, 8, 1.0f);
  CHECK(tight_bbox(full) == BBox{0, 0, 8, 8});

  AlphaMask single(8, 8, 0.0f);
  single.at(3, 4) = 1.0f;
  CHECK(tight_bbox(single) == BBox{3, 4, 1, 1});
}

TEST_CASE("tight_bbox two-pixel span matches exhaustive scan") {
  AlphaMask m(8, 8, 0.0f);
  m.at(1, 1) = 1.0f;
  m.at(5, 2) = 1.0f;
  CHECK(tight_bbox(m) == BBox{1, 1, 5, 2});
}

TEST_CASE("tight_bbox throws on empty mask") {
  AlphaMask m(6, 6, 0.2f);
  CHECK_THROWS_AS(tight_bbox(m), EmptyMask);
}

TEST_CASE("tight_bbox of a cropped mask reproduces the origin box") {
  RngStream rng(21, 3);
  for (int trial = 0; trial < 50; ++trial) {
    AlphaMask m(24, 24, 0.0f);
    int n = rng.uniform_int(1, 30);
    for (int i = 0; i < n; ++i) {
      m.at(rng.uniform_int(2, 20), rng.uniform_int(3, 19)) = 1.0f;
    }
    BBox box = tight_bbox(m);
    AlphaMask cropped(box.w, box.h, 0.0f);
    for (int y = 0; y < box.h; ++y) {
      for (int x = 0; x < box.w; ++x) {
        cropped.at(x, y) = m.at(box.x + x, box.y + y);
      }
    }
    CHECK(tight_bbox(cropped) == BBox{0, 0, box.w, box.h});
  }
}
