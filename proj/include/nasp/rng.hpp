#pragma once

#include <cstdint>
#include <vector>

namespace nasp {

/// 64-bit linear congruential generator (Knuth's MMIX constants). Output is
/// identical on every platform, which the std:: distributions do not
/// guarantee.
class Lcg64 {
 public:
  explicit Lcg64(std::uint64_t seed) : state_(seed) { next(); }

  std::uint64_t next() {
    state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
    return state_;
  }

  /// Uniform in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
  }

  /// Independent stream for sub-task `k`.
  Lcg64 split(std::uint64_t k) const {
    std::uint64_t z = state_ ^ (k + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return Lcg64(z ^ (z >> 31));
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }

 private:
  std::uint64_t state_;
};

}  // namespace nasp
