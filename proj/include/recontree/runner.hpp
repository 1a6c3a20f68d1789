#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "recontree/analytic.hpp"
#include "recontree/estimators.hpp"
#include "recontree/serialize.hpp"

namespace recontree {

inline constexpr std::uint64_t kDefaultSeed = 20240809;

/// Grid configuration shared by the simulate/scan commands.  Identical
/// configs (seed included) produce byte-identical output files for any
/// thread count.
struct RunConfig {
  int k = 3;
  std::string channel = "colouring";  // "colouring" | "bsc"
  double epsilon = 0.25;              // bsc only
  std::string tree = "regular";       // "regular" | "gw_poisson"
  std::vector<double> deltas;
  std::vector<int> depths;
  std::uint64_t trials = 100000;
  std::uint64_t seed = kDefaultSeed;
  int threads = 0;
  std::string format = "csv";  // "csv" | "json"
};

Channel make_channel(const RunConfig& config);
TreeSpec make_tree(const RunConfig& config, double delta, int depth);

struct ScanRow {
  MomentReport report;
  bool have_bounds = false;
  double lower = 0.0, upper = 0.0;
  bool ks = false;
  double contraction = 0.0;
};

std::vector<ScanRow> run_scan(const RunConfig& config);

/// Fixed CSV schema: k, delta, n, trials, x_n, x_n_se, z_n, z_n_se,
/// p_n, p_n_se, tv, tv_se, ks_flag, lower_bound, upper_bound.
void write_scan_csv(std::ostream& os, const RunConfig& config,
                    const std::vector<ScanRow>& rows);
json scan_to_json(const RunConfig& config, const std::vector<ScanRow>& rows);

struct VerifyConfig {
  std::uint64_t trials = 100000;
  std::uint64_t seed = kDefaultSeed;
  int threads = 0;
};

struct VerifySummary {
  std::vector<IdentityCheck> checks;
  bool all_pass = true;
};

/// Desk-scale verification bundle: change-of-measure and child-moment
/// identities on k in {3,4} x delta in {2,3} x n in {1,2}, Z-product
/// envelopes, the multinomial/Poisson coupling, posterior-vs-enumeration
/// sweeps, and a Galton-Watson spot check.
VerifySummary run_verify(const VerifyConfig& config);

json verify_to_json(const VerifyConfig& config, const VerifySummary& summary);

json metadata_json(std::uint64_t seed);

}  // namespace recontree
