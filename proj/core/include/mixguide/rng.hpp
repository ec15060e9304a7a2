#pragma once

#include <cmath>
#include <cstdint>

namespace mixguide {

// Counter-based generator (SplitMix64 core). Stream s of root seed k starts
// from mix(k ^ mix((s+1)*gamma)), so per-trajectory streams derived from
// (seed, index) are decorrelated and reproducible independent of execution
// order or thread count. std::normal_distribution is implementation-defined,
// which would break the byte-identical output contract; normals are produced
// here by Box-Muller on 53-bit uniforms.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0)
      : state_(mix(seed ^ mix((stream + 1) * kGamma))) {}

  std::uint64_t next_u64() {
    state_ += kGamma;
    return mix(state_);
  }

  // uniform in [0, 1), 53-bit resolution
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = next_unit();           // in [0, 1), so 1-u1 in (0, 1]
    double u2 = next_unit();
    double r = std::sqrt(-2.0 * std::log1p(-u1));
    double a = 6.283185307179586477 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ull;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace mixguide
