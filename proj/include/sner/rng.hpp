#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace sner {

// Portable seeded permutation. std::shuffle and std::uniform_int_distribution
// are implementation-defined, so the procedure is spelled out here:
//   engine: std::mt19937_64 seeded with `seed` (its output sequence is fixed
//           by the standard);
//   bounded(n): draw r until r >= (2^64 - n) mod n, return r mod n;
//   shuffle: for i = n-1 down to 1, swap(p[i], p[bounded(i + 1)]),
//            starting from the identity permutation.
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  std::uint64_t bounded(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    std::uint64_t r = engine_();
    while (r < threshold) r = engine_();
    return r % n;
  }

 private:
  std::mt19937_64 engine_;
};

inline std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  PortableRng rng(seed);
  for (std::size_t i = n; i-- > 1;) {
    std::swap(perm[i], perm[rng.bounded(i + 1)]);
  }
  return perm;
}

}  // namespace sner
