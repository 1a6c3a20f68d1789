#pragma once

#include <cstdint>
#include <vector>

namespace recontree {

/// Jointly sampled count vectors over k-1 cells: `multinomial` has a
/// fixed total delta, `poisson` has iid Poisson(D) coordinates, and the
/// smaller-total vector is dominated coordinatewise by construction.
struct CoupledCounts {
  std::vector<int> multinomial;
  std::vector<int> poisson;
  bool dominated = false;
};

CoupledCounts sample_coupled(int k, int delta, double D, std::uint64_t seed,
                             std::uint64_t trial = 0);

struct CouplingTestReport {
  std::uint64_t trials = 0;
  std::uint64_t violations = 0;
  double p_multinomial = 0.0;  // chi-square GOF of one multinomial coordinate
  double p_poisson = 0.0;      // chi-square GOF of one Poisson coordinate
};

CouplingTestReport run_coupling_test(int k, int delta, double D,
                                     std::uint64_t trials, std::uint64_t seed,
                                     int threads = 0);

}  // namespace recontree
