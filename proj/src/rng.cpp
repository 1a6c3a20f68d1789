#include "recontree/rng.hpp"

#include <cmath>
#include <cstdlib>

namespace recontree {

namespace {

constexpr std::uint64_t kPhiloxM = 0xD2B74407B1CE6E93ULL;
constexpr std::uint64_t kPhiloxW = 0x9E3779B97F4A7C15ULL;

inline void mul_hi_lo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi,
                      std::uint64_t& lo) {
  unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  lo = static_cast<std::uint64_t>(p);
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::array<std::uint64_t, 2> philox2x64(std::uint64_t key, std::uint64_t c0,
                                        std::uint64_t c1) {
  std::uint64_t x0 = c0, x1 = c1, k = key;
  for (int round = 0; round < 10; ++round) {
    std::uint64_t hi, lo;
    mul_hi_lo(kPhiloxM, x0, hi, lo);
    x0 = hi ^ k ^ x1;
    x1 = lo;
    k += kPhiloxW;
  }
  return {x0, x1};
}

std::uint64_t fold_seed(std::uint64_t seed, std::uint64_t tag) {
  return splitmix64(seed ^ splitmix64(tag));
}

namespace {

// Hoermann's PTRS transformed rejection, exact for mean >= 10.
int poisson_ptrs(double mean, VertexRng& rng) {
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_mean = std::log(mean);
  for (;;) {
    double u = rng.next_unit() - 0.5;
    double v = rng.next_unit();
    double us = 0.5 - std::fabs(u);
    double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<int>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
    double rhs = kf * log_mean - mean - std::lgamma(kf + 1.0);
    if (lhs <= rhs) return static_cast<int>(kf);
  }
}

}  // namespace

int poisson_sample(double mean, VertexRng& rng) {
  if (mean <= 0.0) return 0;
  if (mean >= 10.0) return poisson_ptrs(mean, rng);
  const double limit = std::exp(-mean);
  int count = -1;
  double prod = 1.0;
  do {
    prod *= rng.next_unit();
    ++count;
  } while (prod > limit);
  return count;
}

}  // namespace recontree
