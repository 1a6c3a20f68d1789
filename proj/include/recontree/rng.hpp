#pragma once

#include <array>
#include <cstdint>

namespace recontree {

// Counter-based generator (philox2x64-10).  A stream is addressed by
// (seed, trial, vertex); draws within a stream advance a block counter.
// Outputs depend only on these indices, so sampling is reproducible no
// matter how trials are scheduled across threads.
std::array<std::uint64_t, 2> philox2x64(std::uint64_t key, std::uint64_t c0,
                                        std::uint64_t c1);

/// Derives an unrelated seed for an auxiliary stream (tagged sub-experiment).
std::uint64_t fold_seed(std::uint64_t seed, std::uint64_t tag);

class VertexRng {
 public:
  VertexRng(std::uint64_t seed, std::uint64_t trial, std::uint64_t vertex)
      : key_(seed), vertex_(vertex), trial_(trial) {}

  std::uint64_t next_u64() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    auto block = philox2x64(key_, vertex_, (trial_ << 32) | block_index_++);
    spare_ = block[1];
    have_spare_ = true;
    return block[0];
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(next_unit() * static_cast<double>(n));
  }

 private:
  std::uint64_t key_;
  std::uint64_t vertex_;
  std::uint64_t trial_;
  std::uint32_t block_index_ = 0;
  std::uint64_t spare_ = 0;
  bool have_spare_ = false;
};

/// Poisson(mean) draw: CDF inversion for small means, transformed
/// rejection (PTRS) for mean >= 10.
int poisson_sample(double mean, VertexRng& rng);

}  // namespace recontree
