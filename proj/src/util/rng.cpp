#include "cwm/util/rng.hpp"

#include <algorithm>

namespace cwm::util {

std::vector<size_t> Rng::sample_indices(size_t n, size_t k) {
  k = std::min(k, n);
  std::vector<size_t> pool(n);
  for (size_t i = 0; i < n; ++i) pool[i] = i;
  // Partial Fisher-Yates: the first k slots end up uniformly sampled.
  for (size_t i = 0; i < k; ++i) {
    size_t j = i + static_cast<size_t>(below(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

namespace {

uint64_t fnv1a64(std::string_view text) {
  uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

uint64_t mix(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

uint64_t derive_seed(uint64_t root, std::string_view stream_name) {
  return mix(root ^ fnv1a64(stream_name));
}

uint64_t derive_seed(uint64_t root, std::string_view stream_name,
                     uint64_t index) {
  return mix(derive_seed(root, stream_name) + 0x9E3779B97F4A7C15ULL * (index + 1));
}

}  // namespace cwm::util
