#include "recontree/bp.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "recontree/errors.hpp"

namespace recontree {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log(1 - e^x) for x <= 0.
inline double log1mexp(double x) {
  if (x == kNegInf) return 0.0;
  if (x > -0.6931471805599453) return std::log(-std::expm1(x));
  return std::log1p(-std::exp(x));
}

struct Layout {
  std::vector<std::size_t> sizes;        // vertices per level, 0..depth
  std::vector<std::size_t> level_first;  // offspring_counts index of level start
};

Layout layout_of(const Channel& channel, const LeafConfig& config) {
  const auto& tree = config.tree;
  Layout lay;
  lay.sizes.assign(static_cast<std::size_t>(tree.depth) + 1, 0);
  lay.level_first.assign(static_cast<std::size_t>(tree.depth) + 1, 0);
  lay.sizes[0] = 1;
  std::size_t idx = 0;
  for (int level = 0; level < tree.depth; ++level) {
    lay.level_first[level] = idx;
    std::size_t next = 0;
    if (idx + lay.sizes[level] > tree.offspring_counts.size())
      throw std::invalid_argument("leaf config: offspring counts truncated");
    for (std::size_t v = 0; v < lay.sizes[level]; ++v)
      next += tree.offspring_counts[idx++];
    lay.sizes[level + 1] = next;
    if (next == 0) {
      for (int l = level + 1; l < tree.depth; ++l) lay.level_first[l + 1] = idx;
      break;
    }
  }
  lay.level_first[tree.depth] = idx;
  if (config.leaf_colours.size() != lay.sizes[tree.depth])
    throw std::invalid_argument("leaf config: leaf count mismatch");
  for (Colour c : config.leaf_colours)
    if (c >= channel.k)
      throw std::invalid_argument("leaf config: colour out of range");
  return lay;
}

/// Upward sweep producing normalized log-beliefs for every vertex of
/// `stop_level`, flat row-major (count x k).
std::vector<double> sweep_to_level(const Channel& channel,
                                   const LeafConfig& config, const Layout& lay,
                                   int stop_level) {
  const int k = channel.k;
  const int depth = config.tree.depth;
  const bool colouring = channel.kind == ChannelKind::Colouring;

  auto normalize = [&](double* row) {
    double hi = kNegInf;
    for (int i = 0; i < k; ++i) hi = std::max(hi, row[i]);
    if (hi == kNegInf)
      throw ZeroProbabilityBoundary(
          "leaf configuration has probability zero under every root colour");
    double sum = 0.0;
    for (int i = 0; i < k; ++i) sum += std::exp(row[i] - hi);
    double logz = hi + std::log(sum);
    for (int i = 0; i < k; ++i) row[i] -= logz;
  };

  if (stop_level == depth) {
    // observed level: point masses on the leaf colours
    std::vector<double> out(lay.sizes[depth] * k, kNegInf);
    for (std::size_t v = 0; v < lay.sizes[depth]; ++v)
      out[v * k + config.leaf_colours[v]] = 0.0;
    return out;
  }

  std::vector<double> below;  // beliefs of level+1 (empty when level+1==depth)
  std::vector<double> cur;
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(k));

  for (int level = depth - 1; level >= stop_level; --level) {
    cur.assign(lay.sizes[level] * static_cast<std::size_t>(k), 0.0);
    std::size_t child = 0;
    const std::size_t offs = lay.level_first[level];
    for (std::size_t v = 0; v < lay.sizes[level]; ++v) {
      double* row = cur.data() + v * k;
      const std::uint32_t nchild = config.tree.offspring_counts[offs + v];
      if (level + 1 == depth) {
        if (colouring) {
          // children are observed: the vertex is uniform over the
          // colours absent among them
          std::fill(seen.begin(), seen.end(), 0);
          int distinct = 0;
          for (std::uint32_t c = 0; c < nchild; ++c) {
            Colour lc = config.leaf_colours[child++];
            if (!seen[lc]) {
              seen[lc] = 1;
              ++distinct;
            }
          }
          if (distinct == k)
            throw ZeroProbabilityBoundary(
                "leaf configuration has probability zero under every root "
                "colour");
          const double lp = -std::log(static_cast<double>(k - distinct));
          for (int i = 0; i < k; ++i) row[i] = seen[i] ? kNegInf : lp;
          continue;
        }
        for (std::uint32_t c = 0; c < nchild; ++c) {
          Colour lc = config.leaf_colours[child++];
          for (int i = 0; i < k; ++i) {
            double m = channel(i, lc);
            row[i] += m > 0.0 ? std::log(m) : kNegInf;
          }
        }
        normalize(row);
        continue;
      }
      for (std::uint32_t c = 0; c < nchild; ++c) {
        const double* cp = below.data() + child * k;
        ++child;
        if (colouring) {
          for (int i = 0; i < k; ++i) row[i] += log1mexp(cp[i]);
        } else {
          for (int i = 0; i < k; ++i) {
            double hi = kNegInf;
            for (int j = 0; j < k; ++j) {
              double m = channel(i, j);
              if (m > 0.0) hi = std::max(hi, std::log(m) + cp[j]);
            }
            if (hi == kNegInf) {
              row[i] = kNegInf;
              continue;
            }
            double s = 0.0;
            for (int j = 0; j < k; ++j) {
              double m = channel(i, j);
              if (m > 0.0) s += std::exp(std::log(m) + cp[j] - hi);
            }
            row[i] += hi + std::log(s);
          }
        }
      }
      normalize(row);
    }
    below = std::move(cur);
  }
  return below;
}

Belief belief_from_log(const double* row, int k) {
  Belief b;
  b.probs.resize(static_cast<std::size_t>(k));
  double sum = 0.0;
  for (int i = 0; i < k; ++i) {
    b.probs[i] = std::exp(row[i]);
    sum += b.probs[i];
  }
  for (int i = 0; i < k; ++i) b.probs[i] /= sum;
  return b;
}

}  // namespace

Belief root_posterior(const Channel& channel, const LeafConfig& config) {
  Layout lay = layout_of(channel, config);
  auto logs = sweep_to_level(channel, config, lay, 0);
  return belief_from_log(logs.data(), channel.k);
}

std::vector<Belief> child_posteriors(const Channel& channel,
                                     const LeafConfig& config) {
  if (config.tree.depth < 1)
    throw std::invalid_argument("child_posteriors needs depth >= 1");
  Layout lay = layout_of(channel, config);
  auto logs = sweep_to_level(channel, config, lay, 1);
  std::vector<Belief> out;
  out.reserve(lay.sizes[1]);
  for (std::size_t v = 0; v < lay.sizes[1]; ++v)
    out.push_back(belief_from_log(logs.data() + v * channel.k, channel.k));
  return out;
}

Belief enumerate_posterior(const Channel& channel, const LeafConfig& config,
                           std::uint64_t term_cap) {
  const int k = channel.k;
  const int depth = config.tree.depth;
  Layout lay = layout_of(channel, config);

  if (depth == 0) {
    Belief b;
    b.probs.assign(static_cast<std::size_t>(k), 0.0);
    b.probs[config.leaf_colours[0]] = 1.0;
    return b;
  }

  // flatten the tree: BFS vertex -> parent, depth
  std::size_t total_vertices = 0;
  for (auto s : lay.sizes) total_vertices += s;
  std::vector<std::size_t> parent(total_vertices, 0);
  std::vector<int> vdepth(total_vertices, 0);
  {
    std::size_t idx = 0, next = 1;
    for (int level = 0; level < depth; ++level) {
      std::size_t first = 0;
      for (int l = 0; l < level; ++l) first += lay.sizes[l];
      for (std::size_t v = 0; v < lay.sizes[level]; ++v) {
        std::size_t me = first + v;
        std::uint32_t nchild = config.tree.offspring_counts[idx++];
        for (std::uint32_t c = 0; c < nchild; ++c) {
          parent[next] = me;
          vdepth[next] = level + 1;
          ++next;
        }
      }
    }
  }

  std::vector<std::size_t> interior;  // depths 1..depth-1, BFS order
  for (std::size_t v = 1; v < total_vertices; ++v)
    if (vdepth[v] < depth) interior.push_back(v);
  const std::size_t m = interior.size();

  double terms = 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    terms *= k;
    if (terms > static_cast<double>(term_cap))
      throw InstanceTooLarge("enumeration would need more than " +
                             std::to_string(term_cap) + " terms");
  }

  std::vector<std::size_t> interior_pos(total_vertices, SIZE_MAX);
  for (std::size_t t = 0; t < m; ++t) interior_pos[interior[t]] = t;

  // per-position product over leaf children, as a function of own colour
  std::vector<std::vector<double>> leaf_prod(m);
  std::vector<double> root_leaf_prod(static_cast<std::size_t>(k), 1.0);
  {
    const std::size_t leaf_first = total_vertices - lay.sizes[depth];
    for (std::size_t leaf = 0; leaf < lay.sizes[depth]; ++leaf) {
      std::size_t p = parent[leaf_first + leaf];
      Colour lc = config.leaf_colours[leaf];
      if (p == 0) {
        for (int c = 0; c < k; ++c) root_leaf_prod[c] *= channel(c, lc);
      } else {
        auto& lp = leaf_prod[interior_pos[p]];
        if (lp.empty()) lp.assign(static_cast<std::size_t>(k), 1.0);
        for (int c = 0; c < k; ++c) lp[c] *= channel(c, lc);
      }
    }
    for (auto& lp : leaf_prod)
      if (lp.empty()) lp.assign(static_cast<std::size_t>(k), 1.0);
  }

  std::vector<std::size_t> parent_pos(m);  // SIZE_MAX marks the root
  for (std::size_t t = 0; t < m; ++t)
    parent_pos[t] = parent[interior[t]] == 0 ? SIZE_MAX : interior_pos[parent[interior[t]]];

  std::vector<double> totals(static_cast<std::size_t>(k), 0.0);
  std::vector<int> digit(m, 0);
  std::vector<double> factor(m, 0.0);
  std::vector<double> suffix(m + 1, 1.0);

  for (int r = 0; r < k; ++r) {
    if (m == 0) {
      totals[r] = root_leaf_prod[r];
      continue;
    }
    std::fill(digit.begin(), digit.end(), 0);
    auto recompute_from = [&](std::size_t pos) {
      for (std::size_t t = pos; t < m; ++t) {
        int pc = parent_pos[t] == SIZE_MAX ? r : digit[parent_pos[t]];
        factor[t] = channel(pc, digit[t]) * leaf_prod[t][digit[t]];
      }
      for (std::size_t t = m; t-- > pos;) suffix[t] = factor[t] * suffix[t + 1];
    };
    recompute_from(0);
    double sum = 0.0;
    for (;;) {
      sum += suffix[0];
      std::size_t pos = m - 1;
      while (digit[pos] == k - 1) {
        digit[pos] = 0;
        if (pos == 0) goto done;
        --pos;
      }
      ++digit[pos];
      recompute_from(pos);
    }
  done:
    totals[r] = sum * root_leaf_prod[r];
  }

  double total = 0.0;
  for (int r = 0; r < k; ++r) total += totals[r];
  if (total <= 0.0)
    throw ZeroProbabilityBoundary(
        "leaf configuration has probability zero under every root colour");
  Belief b;
  b.probs.resize(static_cast<std::size_t>(k));
  for (int r = 0; r < k; ++r) b.probs[r] = totals[r] / total;
  return b;
}

bool frozen_root(const Channel& channel, const LeafConfig& config) {
  if (channel.kind != ChannelKind::Colouring)
    throw std::invalid_argument("frozen_root is defined for colouring channels");
  const int k = channel.k;
  const int depth = config.tree.depth;
  Layout lay = layout_of(channel, config);
  if (depth == 0) return true;
  if (lay.sizes[depth] == 0) return false;  // extinct boundary, no information

  constexpr int kFree = -1;
  std::vector<int> below(config.leaf_colours.begin(), config.leaf_colours.end());
  std::vector<int> cur;
  const std::size_t words = (static_cast<std::size_t>(k) + 63) / 64;
  std::vector<std::uint64_t> mask(words);

  for (int level = depth - 1; level >= 0; --level) {
    cur.assign(lay.sizes[level], kFree);
    std::size_t child = 0;
    const std::size_t offs = lay.level_first[level];
    for (std::size_t v = 0; v < lay.sizes[level]; ++v) {
      std::fill(mask.begin(), mask.end(), 0);
      int covered = 0;
      const std::uint32_t nchild = config.tree.offspring_counts[offs + v];
      for (std::uint32_t c = 0; c < nchild; ++c) {
        int fc = below[child++];
        if (fc == kFree) continue;
        std::uint64_t bit = 1ULL << (fc & 63);
        if (!(mask[static_cast<std::size_t>(fc) >> 6] & bit)) {
          mask[static_cast<std::size_t>(fc) >> 6] |= bit;
          ++covered;
        }
      }
      if (covered == k)
        throw ZeroProbabilityBoundary(
            "leaf configuration has probability zero under every root colour");
      if (covered == k - 1) {
        for (int c = 0; c < k; ++c)
          if (!(mask[static_cast<std::size_t>(c) >> 6] & (1ULL << (c & 63)))) {
            cur[v] = c;
            break;
          }
      }
    }
    below = std::move(cur);
  }
  return below[0] != kFree;
}

}  // namespace recontree
