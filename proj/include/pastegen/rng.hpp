#pragma once

#include <cmath>
#include <cstdint>

namespace pastegen {

// Counter-based random stream. Every draw is a pure function of
// (global_seed, stream_index, counter), so per-image streams are independent
// of scheduling order and reproducible across runs.
class RngStream {
 public:
  RngStream(std::uint64_t global_seed, std::uint64_t stream_index)
      : key_(derive_key(global_seed, stream_index)) {}

  std::uint64_t next_u64() { return mix64(key_ + (++counter_) * kGamma); }

  // Uniform in [0,1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer, both bounds inclusive.
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via Box-Muller; consumes two draws per call.
  double normal() {
    double u1 = 1.0 - uniform();  // (0,1]
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  std::uint64_t counter() const { return counter_; }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

  static std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream) {
    return mix64(mix64(seed + kGamma) ^ mix64(stream + 0x6A09E667F3BCC909ull));
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace pastegen
