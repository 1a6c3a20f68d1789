#include "recontree/broadcast.hpp"

#include <stdexcept>

#include "recontree/rng.hpp"

namespace recontree {

std::vector<std::size_t> SampledTree::level_sizes() const {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(depth) + 1, 0);
  sizes[0] = 1;
  std::size_t idx = 0;
  for (int level = 0; level < depth; ++level) {
    std::size_t next = 0;
    for (std::size_t v = 0; v < sizes[level]; ++v) next += offspring_counts[idx++];
    sizes[level + 1] = next;
    if (next == 0) break;  // extinct before reaching full depth
  }
  return sizes;
}

std::size_t SampledTree::leaf_count() const {
  if (depth == 0) return 1;
  return level_sizes()[depth];
}

namespace {

inline Colour draw_child_colour(const Channel& channel, Colour parent,
                                VertexRng& rng) {
  const int k = channel.k;
  if (channel.kind == ChannelKind::Colouring) {
    // uniform over the k-1 colours different from the parent
    auto idx = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(k - 1)));
    return static_cast<Colour>(idx >= parent ? idx + 1 : idx);
  }
  double u = rng.next_unit();
  double acc = 0.0;
  for (int j = 0; j < k - 1; ++j) {
    acc += channel(parent, j);
    if (u < acc) return static_cast<Colour>(j);
  }
  return static_cast<Colour>(k - 1);
}

}  // namespace

LeafConfig sample_broadcast(const Channel& channel, const TreeSpec& tree,
                            std::optional<Colour> root, std::uint64_t seed,
                            std::uint64_t trial) {
  const int k = channel.k;
  if (k < 2) throw std::invalid_argument("sample_broadcast: invalid channel");
  if (root && *root >= k)
    throw std::invalid_argument("sample_broadcast: root colour out of range");

  LeafConfig config;
  config.tree.depth = tree.depth;

  Colour root_colour;
  if (root) {
    root_colour = *root;
  } else {
    VertexRng rng(seed, trial, 0);
    root_colour = static_cast<Colour>(rng.next_below(static_cast<std::uint64_t>(k)));
  }
  config.root_colour = root_colour;

  std::vector<Colour> current{root_colour};
  std::uint64_t next_vertex = 1;  // breadth-first index; root is 0
  std::uint64_t level_start = 0;  // index of first vertex on `current`

  for (int level = 0; level < tree.depth && !current.empty(); ++level) {
    std::vector<Colour> next;
    if (tree.kind == TreeKind::Regular)
      next.reserve(current.size() * static_cast<std::size_t>(tree.branching()));
    for (std::size_t v = 0; v < current.size(); ++v) {
      std::uint32_t children;
      if (tree.kind == TreeKind::Regular) {
        children = static_cast<std::uint32_t>(tree.branching());
      } else {
        // offspring draw shares the vertex stream, after the colour draw
        VertexRng rng(seed, trial, level_start + v);
        rng.next_u64();
        children = static_cast<std::uint32_t>(poisson_sample(tree.delta, rng));
      }
      config.tree.offspring_counts.push_back(children);
      for (std::uint32_t c = 0; c < children; ++c) {
        VertexRng rng(seed, trial, next_vertex++);
        next.push_back(draw_child_colour(channel, current[v], rng));
      }
    }
    level_start += current.size();
    current = std::move(next);
  }

  config.leaf_colours = std::move(current);
  return config;
}

int sample_gw_offspring(double mean, std::uint64_t seed) {
  if (!(mean > 0.0))
    throw std::invalid_argument("sample_gw_offspring: mean must be > 0");
  VertexRng rng(seed, 0, 0);
  return poisson_sample(mean, rng);
}

}  // namespace recontree
