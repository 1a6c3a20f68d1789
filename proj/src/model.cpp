#include "recontree/model.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace recontree {

namespace {

void validate_rows(int k, const std::vector<double>& m) {
  if (k < 2) throw std::invalid_argument("channel needs k >= 2");
  if (m.size() != static_cast<std::size_t>(k) * k)
    throw std::invalid_argument("channel matrix must be k*k");
  for (int i = 0; i < k; ++i) {
    double row = 0.0;
    for (int j = 0; j < k; ++j) {
      double v = m[static_cast<std::size_t>(i) * k + j];
      if (v < 0.0 || v > 1.0)
        throw std::invalid_argument("channel entries must lie in [0,1]");
      row += v;
    }
    if (std::fabs(row - 1.0) > 1e-12)
      throw std::invalid_argument("channel row " + std::to_string(i) +
                                  " does not sum to 1");
  }
}

}  // namespace

Channel colouring_channel(int k) {
  if (k < 2) throw std::invalid_argument("colouring channel needs k >= 2");
  Channel c;
  c.kind = ChannelKind::Colouring;
  c.k = k;
  c.matrix.assign(static_cast<std::size_t>(k) * k, 1.0 / (k - 1));
  for (int i = 0; i < k; ++i) c.matrix[static_cast<std::size_t>(i) * k + i] = 0.0;
  return c;
}

Channel bsc_channel(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.5))
    throw std::invalid_argument("bsc channel needs 0 < epsilon < 1/2");
  Channel c;
  c.kind = ChannelKind::Bsc;
  c.k = 2;
  c.epsilon = epsilon;
  c.matrix = {1.0 - epsilon, epsilon, epsilon, 1.0 - epsilon};
  return c;
}

Channel channel_from_matrix(int k, std::vector<double> matrix) {
  validate_rows(k, matrix);
  Channel c;
  c.kind = ChannelKind::General;
  c.k = k;
  c.matrix = std::move(matrix);
  return c;
}

double second_eigenvalue(const Channel& channel) {
  if (channel.k < 2 || channel.matrix.empty())
    throw std::invalid_argument("second_eigenvalue: invalid channel");
  switch (channel.kind) {
    case ChannelKind::Colouring:
      return -1.0 / (channel.k - 1);
    case ChannelKind::Bsc:
      return 1.0 - 2.0 * channel.epsilon;
    case ChannelKind::General:
      break;
  }
  const int k = channel.k;
  Eigen::MatrixXd m(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) m(i, j) = channel(i, j);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
  std::vector<std::pair<double, double>> eigs;  // (|lambda|, Re lambda)
  for (int i = 0; i < k; ++i) {
    auto ev = solver.eigenvalues()(i);
    eigs.emplace_back(std::abs(ev), ev.real());
  }
  // ties in |lambda| (the flip channel has {1, -1}) resolve in favour of
  // the stochastic-matrix top eigenvalue, so index 1 is the channel's
  // information eigenvalue
  std::sort(eigs.begin(), eigs.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second > b.second;
  });
  return eigs[1].second;
}

TreeSpec regular_tree(int delta, int depth) {
  if (delta < 1) throw std::invalid_argument("regular tree needs delta >= 1");
  if (depth < 0) throw std::invalid_argument("tree depth must be >= 0");
  TreeSpec t;
  t.kind = TreeKind::Regular;
  t.delta = delta;
  t.depth = depth;
  return t;
}

TreeSpec gw_poisson_tree(double mean, int depth) {
  if (!(mean > 0.0))
    throw std::invalid_argument("Galton-Watson tree needs mean > 0");
  if (depth < 0) throw std::invalid_argument("tree depth must be >= 0");
  TreeSpec t;
  t.kind = TreeKind::GaltonWatsonPoisson;
  t.delta = mean;
  t.depth = depth;
  return t;
}

}  // namespace recontree
