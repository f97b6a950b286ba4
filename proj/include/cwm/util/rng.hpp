#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace cwm::util {

// Deterministic 64-bit generator (splitmix64). The standard <random>
// distributions are implementation-defined, so every draw used anywhere in
// the pipeline goes through this class to keep outputs byte-identical
// across platforms and library versions.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n). Multiply-shift keeps the draw exact and portable.
  uint64_t below(uint64_t n) {
    return static_cast<uint64_t>(
        (static_cast<__uint128_t>(next_u64()) * n) >> 64);
  }

  // Uniform in [0, 1) with 53 bits of mantissa.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Fisher-Yates, in place.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (size_t i = items.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  // Sample k distinct indices from [0, n), order-stable in the draw sequence.
  std::vector<size_t> sample_indices(size_t n, size_t k);

 private:
  uint64_t state_;
};

// Stable named sub-seed so every component draws from its own stream.
// FNV-1a over the name, folded into the root seed.
uint64_t derive_seed(uint64_t root, std::string_view stream_name);
uint64_t derive_seed(uint64_t root, std::string_view stream_name,
                     uint64_t index);

}  // namespace cwm::util
