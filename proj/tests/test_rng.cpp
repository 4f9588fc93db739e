#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "pastegen/rng.hpp"

using namespace pastegen;

TEST_CASE("identical (seed, index) reproduces the sequence exactly") {
  RngStream a(42, 7);
  RngStream b(42, 7);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
}

TEST_CASE("different stream indices diverge") {
  RngStream a(42, 0);
  RngStream b(42, 1);
  int differing = 0;
  for (int i = 0; i < 1000; ++i) {
    if (a.next_u64() != b.next_u64()) ++differing;
  }
  CHECK(differing > 990);
}

TEST_CASE("different seeds diverge on the same stream") {
  RngStream a(1, 5);
  RngStream b(2, 5);
  int differing = 0;
  for (int i = 0; i < 1000; ++i) {
    if (a.next_u64() != b.next_u64()) ++differing;
  }
  CHECK(differing > 990);
}

TEST_CASE("uniform mean over 1e5 draws within 0.5 +- 0.01") {
  RngStream rng(123, 0);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += rng.uniform();
  CHECK(std::abs(sum / n - 0.5) < 0.01);
}

TEST_CASE("uniform_int covers its inclusive range") {
  RngStream rng(9, 9);
  std::vector<int> counts(5, 0);
  for (int i = 0; i < 5000; ++i) {
    int v = rng.uniform_int(2, 6);
    REQUIRE(v >= 2);
    REQUIRE(v <= 6);
    ++counts[v - 2];
  }
  for (int c : counts) CHECK(c > 800);
}

TEST_CASE("normal draws have roughly unit variance") {
  RngStream rng(77, 1);
  const int n = 50000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    double v = rng.normal();
    sum += v;
    sq += v * v;
  }
  double mean = sum / n;
  double var = sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(std::abs(var - 1.0) < 0.03);
}

TEST_CASE("draws are a pure function of the counter") {
  RngStream a(5, 2);
  a.next_u64();
  a.next_u64();
  std::uint64_t third = a.next_u64();

  RngStream b(5, 2);
  b.next_u64();
  b.next_u64();
  CHECK(b.next_u64() == third);
  CHECK(b.counter() == 3);
}
