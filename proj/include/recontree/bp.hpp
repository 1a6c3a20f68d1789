#pragma once

#include <cstdint>
#include <vector>

#include "recontree/broadcast.hpp"
#include "recontree/model.hpp"

namespace recontree {

/// Probability vector over root colours; entries >= 0 and sum to 1.
struct Belief {
  std::vector<double> probs;
};

/// Exact conditional distribution of the root given the leaf colours
/// under the broadcast measure with uniform root prior, computed
/// bottom-up in log space.  An empty boundary yields the uniform belief.
/// Throws ZeroProbabilityBoundary if no root colour is consistent.
Belief root_posterior(const Channel& channel, const LeafConfig& config);

/// Beliefs of the root's children given their own subtrees' leaves,
/// breadth-first.  Same recursion as root_posterior, stopped one level
/// short.  Requires depth >= 1.
std::vector<Belief> child_posteriors(const Channel& channel,
                                     const LeafConfig& config);

/// Independent oracle: sums the product measure over all assignments of
/// the interior vertices (depths 1..depth-1).  Throws InstanceTooLarge
/// when k^interior exceeds term_cap.
Belief enumerate_posterior(const Channel& channel, const LeafConfig& config,
                           std::uint64_t term_cap = 10'000'000);

/// True iff the leaf colours force the root colour, decided by exact
/// set arithmetic: a vertex is forced to c when its forced children
/// cover every colour except c.  Colouring channels only.
bool frozen_root(const Channel& channel, const LeafConfig& config);

}  // namespace recontree
