#pragma once

#include <cstdint>
#include <vector>

namespace recontree {

enum class ChannelKind { Colouring, Bsc, General };

/// Row-stochastic transition matrix over k colours.  Instances are
/// immutable after construction and safe to share across threads.
struct Channel {
  ChannelKind kind = ChannelKind::General;
  int k = 0;
  std::vector<double> matrix;  // row-major, k*k
  double epsilon = 0.0;        // flip probability, Bsc only

  double operator()(int from, int to) const {
    return matrix[static_cast<std::size_t>(from) * k + to];
  }
};

/// Uniform-over-other-colours channel: zero diagonal, 1/(k-1) elsewhere.
Channel colouring_channel(int k);

/// Two-colour channel [[1-eps, eps], [eps, 1-eps]], 0 < eps < 1/2.
Channel bsc_channel(double epsilon);

/// Arbitrary row-stochastic matrix; rows must sum to 1 within 1e-12.
Channel channel_from_matrix(int k, std::vector<double> matrix);

/// Second-largest eigenvalue by absolute value, signed.  Closed forms
/// -1/(k-1) and 1-2*eps for the constructor kinds; dense eigensolver
/// (tolerance 1e-10) otherwise.
double second_eigenvalue(const Channel& channel);

enum class TreeKind { Regular, GaltonWatsonPoisson };

/// Rooted tree shape: every internal vertex has delta offspring
/// (Regular) or Poisson(delta) offspring (GaltonWatsonPoisson),
/// truncated at `depth` levels below the root.
struct TreeSpec {
  TreeKind kind = TreeKind::Regular;
  double delta = 0.0;  // branching factor (integer for Regular) or mean
  int depth = 0;

  int branching() const { return static_cast<int>(delta); }
};

TreeSpec regular_tree(int delta, int depth);
TreeSpec gw_poisson_tree(double mean, int depth);

}  // namespace recontree
