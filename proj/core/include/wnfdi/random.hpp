#pragma once

#include <cstdint>
#include <vector>

namespace wnfdi {

// splitmix64 generator. Every random quantity in the project is drawn from
// this generator so that results are bit-reproducible across platforms and
// standard library versions; std::mt19937 distributions are implementation
// defined and are deliberately avoided.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n). Multiply-shift mapping; bias is below 2^-64
  // per draw which is irrelevant for the sample sizes used here.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  // In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
};

// Derives an independent child seed from a master seed and a stream id.
// Scenario k of a dataset uses stream id k, so the noise draws for one
// scenario do not depend on how many scenarios run before it (or on the
// thread that runs it).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  SplitMix64 g(master ^ 0x6a09e667f3bcc909ull);
  g.next();
  SplitMix64 h(g.next() + 0x9e3779b97f4a7c15ull * (stream + 1));
  h.next();
  return h.next();
}

// FNV-1a 64-bit hash; used for config/file provenance fingerprints.
inline std::uint64_t fnv1a64(const void* data, std::size_t size) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace wnfdi
