#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "recontree/bp.hpp"
#include "recontree/broadcast.hpp"
#include "recontree/model.hpp"
#include "recontree/stats.hpp"

namespace recontree {

/// Monte Carlo summary for one (channel, tree, depth) instance.
/// x_n: mean posterior weight of the true root colour (root conditioned);
/// z_n: mean squared deviation of that weight from 1/k;
/// p_n: probability the boundary freezes the root;
/// tv:  total variation distance between the leaf laws of two root colours.
struct MomentReport {
  int k = 0;
  TreeSpec tree;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  Estimate x_n{nan_marker(), 0.0};
  Estimate z_n{nan_marker(), 0.0};
  Estimate p_n{nan_marker(), 0.0};
  Estimate tv{nan_marker(), 0.0};

  static double nan_marker();
  int depth() const { return tree.depth; }
};

/// One verified identity: measured vs predicted with a combined sigma;
/// pass gates are 4*sigma everywhere.
struct IdentityCheck {
  std::string name;
  double measured = 0.0;
  double predicted = 0.0;
  double sigma = 0.0;
  bool pass = false;
  bool applicable = true;
  std::string note;
};

MomentReport estimate_xn_zn(const Channel& channel, const TreeSpec& tree,
                            std::uint64_t trials, std::uint64_t seed,
                            int threads = 0);

MomentReport estimate_pn(const Channel& channel, const TreeSpec& tree,
                         std::uint64_t trials, std::uint64_t seed,
                         int threads = 0);

MomentReport estimate_tv(const Channel& channel, const TreeSpec& tree,
                         std::uint64_t trials, std::uint64_t seed,
                         int threads = 0);

/// x_n, z_n, p_n from one conditioned stream plus tv from an
/// unconditioned stream; what the `simulate` and `scan` commands emit.
MomentReport simulate_report(const Channel& channel, const TreeSpec& tree,
                             std::uint64_t trials, std::uint64_t seed,
                             int threads = 0);

/// Checks E[X+] = E[sum_i X_i^2] and E[sum_i (X_i - 1/k)^2] = x_n - 1/k
/// on paired samples (root conditioned to the first colour).
std::vector<IdentityCheck> verify_change_of_measure(const Channel& channel,
                                                    const TreeSpec& tree,
                                                    std::uint64_t trials,
                                                    std::uint64_t seed,
                                                    int threads = 0);

struct MeasuredPredicted {
  Estimate measured;
  Estimate predicted;
  double sigma = 0.0;
  bool pass = false;
};

/// One-sided covariance sign check (must be <= 0 within 4 sigma).
struct CovCheck {
  double value = 0.0;
  double se = 0.0;
  bool pass = false;
  bool applicable = true;
};

/// Child-subtree belief moments against their closed forms in (x_n, z_n).
/// The tree passed in is the sampling tree of depth n+1; Y statistics
/// refer to its depth-n child subtrees.  x_n and z_n come from an
/// independent stream so the comparison is unbiased.
struct YZMomentReport {
  int k = 0;
  int delta = 0;
  int n = 0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  Estimate x_n, z_n;
  MeasuredPredicted mean_y1, mean_y1_sq, mean_yi, mean_yi_sq;
  MeasuredPredicted mean_z1, mean_z1_sq, mean_zi, mean_zi_sq;
  CovCheck cov_y_true_other, cov_y_other_other;
  CovCheck cov_z_true_other, cov_z_other_other;
  IdentityCheck balance;  // E[X+] + (k-1) E[X-] = 1
  Estimate zsum_mean;
  double z1_var = 0.0, z1_var_se = 0.0;
  double zsum_var = 0.0, zsum_var_se = 0.0;

  std::vector<IdentityCheck> checks() const;
  bool all_pass() const;
};

YZMomentReport verify_appendix_moments(const Channel& channel,
                                       const TreeSpec& tree,
                                       std::uint64_t trials,
                                       std::uint64_t seed, int threads = 0);

/// Mean/variance envelopes for the Z products at the measured x_n.
/// Applicable only when delta <= 2k log k and x_n <= 2/k; otherwise the
/// entries come back marked not-applicable.
std::vector<IdentityCheck> check_z_bounds(const YZMomentReport& report, int k,
                                          int delta);

}  // namespace recontree
