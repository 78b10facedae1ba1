#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace tdr {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// xoshiro256++ (Blackman/Vigna), seeded through splitmix64.  Small state so
// that each Monte Carlo replica can own an independent stream derived from
// (seed, replica); merging replica results in index order keeps every
// estimator reproducible regardless of thread count.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& w : s_) w = splitmix64(s);
  }

  static Rng stream(std::uint64_t seed, std::uint64_t replica) {
    std::uint64_t s = seed;
    std::uint64_t a = splitmix64(s);
    std::uint64_t mix = a ^ (replica * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
    return Rng(mix);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // uniform in [0,1), 53-bit resolution
  double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // standard normal (Box-Muller; consumes two uniforms)
  double normal() {
    double u1 = u01();
    while (u1 <= 0.0) u1 = u01();
    const double u2 = u01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  // index i with probability cum[i]-cum[i-1]; cum is nondecreasing, back()==1
  int categorical(const std::vector<double>& cum) {
    const double u = u01();
    int lo = 0, hi = static_cast<int>(cum.size()) - 1;
    while (lo < hi) {
      const int mid = (lo + hi) / 2;
      if (u < cum[mid])
        hi = mid;
      else
        lo = mid + 1;
    }
    return lo;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

}  // namespace tdr
