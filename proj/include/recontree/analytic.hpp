#pragma once

#include <cstdint>
#include <vector>

#include "recontree/model.hpp"

namespace recontree {

/// Decay rate D = log k + log log k + beta (natural logs); needs k >= 3.
struct ThresholdParams {
  int k = 0;
  double beta = 0.0;
  double D = 0.0;
};

ThresholdParams threshold_params(int k, double beta);

/// Tail value plus whether it came from exact summation (up to 1e6
/// terms) or the flagged normal approximation with continuity correction.
struct PoissonTail {
  double value = 0.0;
  bool exact = true;
};

PoissonTail poisson_tail_below_ex(double mean, std::int64_t threshold);
PoissonTail poisson_tail_above_ex(double mean, std::int64_t threshold);

/// P(Poisson(mean) < threshold).
double poisson_tail_below(double mean, std::int64_t threshold);
/// P(Poisson(mean) > threshold).
double poisson_tail_above(double mean, std::int64_t threshold);

struct IterationTrace {
  std::vector<double> values;
  bool converged = false;
  double limit_estimate = 0.0;
  /// Decay map: limit < 2/k.  Reconstruction map: every iterate stayed
  /// at or above 1 - 1/log k.
  bool conclusion = false;
};

/// One application of the scalar decay map
///   y -> p + (1 - exp(-(k-1) e^{-yD})) / ((k-1) e^{-yD}).
double decay_map_value(int k, double D, double p, double y);

/// Iterates the decay map from y_0 = 1 with
/// p = P(Poisson((k-1) D) < delta), D from beta_star.
IterationTrace iterate_decay_map(int k, double beta_star, std::int64_t delta,
                                 int max_steps = 10000, double tol = 1e-12);

/// One application of the frozen-root map  x -> (1 - e^{-xD})^{k-1} - s.
double reconstruction_map_value(int k, double D, double s, double x);

/// Iterates the frozen-root map from p_0 = 1 with
/// s = P(Poisson((k-1) D) > delta).
IterationTrace iterate_reconstruction_map(int k, double beta_star,
                                          std::int64_t delta,
                                          int max_steps = 10000,
                                          double tol = 1e-12);

struct ContractionInfo {
  double coefficient = 0.0;   // 13 delta / k^2
  bool hypothesis_holds = false;  // delta <= 2 k log k
  bool at_most_half = false;
};

ContractionInfo contraction_coefficient(int k, double delta);

/// Reconstruction threshold envelope for the colouring model:
/// lower = k(log k + log log k + 1 - ln 2), upper = k(log k + log log k + 1).
/// Both are asymptotic (o(1) terms reported as zero).
struct ThresholdBounds {
  double lower = 0.0;
  double upper = 0.0;
};

ThresholdBounds threshold_bounds(int k);

/// Census reconstruction test: delta * lambda_2^2 > 1 (strict).
bool ks_reconstructs(const Channel& channel, double delta);

/// Uniqueness of the colouring model on the delta-ary tree: k >= delta + 2.
bool uniqueness_holds(int k, int delta);

}  // namespace recontree
