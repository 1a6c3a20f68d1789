#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace recontree {

/// Point estimate with plain sample-variance standard error.
struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

/// Moment sums of a set of per-trial statistic vectors.  Sums are
/// accumulated per fixed-size chunk and reduced in chunk order, so the
/// result is bit-identical for any worker count.
class TrialSums {
 public:
  TrialSums(std::uint64_t trials, std::size_t nstats)
      : trials_(trials), nstats_(nstats), sum_(nstats, 0.0),
        cross_(nstats * nstats, 0.0) {}

  std::uint64_t trials() const { return trials_; }
  double mean(std::size_t i) const { return sum_[i] / trials_; }
  /// Unbiased sample covariance of statistics i and j.
  double cov(std::size_t i, std::size_t j) const;
  double var(std::size_t i) const { return cov(i, i); }
  /// Standard error of mean(i).
  double se(std::size_t i) const;
  Estimate estimate(std::size_t i) const { return {mean(i), se(i)}; }
  /// Covariance of the two MEANS (cov / trials).
  double mean_cov(std::size_t i, std::size_t j) const;

  void add(const double* stats);
  void merge(const TrialSums& other);

 private:
  std::uint64_t trials_;
  std::size_t nstats_;
  std::vector<double> sum_;
  std::vector<double> cross_;
};

/// Runs `trial_fn(trial, out)` for trial in [0, trials) on `threads`
/// workers (0 = hardware concurrency) and returns deterministic moment
/// sums.  trial_fn must fill out[0..nstats).
TrialSums accumulate_trials(std::uint64_t trials, int threads,
                            std::size_t nstats,
                            const std::function<void(std::uint64_t, double*)>& trial_fn);

int resolve_threads(int threads);

/// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);

/// Standard normal CDF.
double normal_cdf(double z);

/// Chi-square goodness-of-fit p-value for observed counts against
/// expected counts; cells with expected < min_expected are pooled into
/// their right neighbour.
double chi_square_gof_pvalue(const std::vector<double>& observed,
                             const std::vector<double>& expected,
                             double min_expected = 5.0);

}  // namespace recontree
