#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "recontree/model.hpp"

namespace recontree {

using Colour = std::uint16_t;

/// One realized tree shape: child counts of the internal vertices
/// (depths 0..depth-1) in breadth-first order, children left to right.
struct SampledTree {
  int depth = 0;
  std::vector<std::uint32_t> offspring_counts;

  /// Vertex count per level, levels 0..depth.
  std::vector<std::size_t> level_sizes() const;
  std::size_t leaf_count() const;
};

/// Colours observed at depth `tree.depth`, breadth-first.  The interior
/// is discarded; `root_colour` records the colour the sample was
/// generated from (it is not an observation unless depth == 0).
struct LeafConfig {
  SampledTree tree;
  Colour root_colour = 0;
  std::vector<Colour> leaf_colours;
};

/// Runs the broadcast process: the root colour is `root` (or uniform if
/// absent) and every child draws its colour from the parent's channel
/// row.  Identical (seed, trial, inputs) give identical output.
LeafConfig sample_broadcast(const Channel& channel, const TreeSpec& tree,
                            std::optional<Colour> root, std::uint64_t seed,
                            std::uint64_t trial = 0);

/// One Poisson(mean) offspring count from a fresh stream.
int sample_gw_offspring(double mean, std::uint64_t seed);

}  // namespace recontree
