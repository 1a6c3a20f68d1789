#include "recontree/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "recontree/stats.hpp"

namespace recontree {

ThresholdParams threshold_params(int k, double beta) {
  if (k < 3)
    throw std::domain_error("threshold parameters need k >= 3 (log log k)");
  ThresholdParams p;
  p.k = k;
  p.beta = beta;
  p.D = std::log(static_cast<double>(k)) +
        std::log(std::log(static_cast<double>(k))) + beta;
  if (!(p.D > 0.0)) throw std::invalid_argument("derived rate D must be > 0");
  return p;
}

namespace {

constexpr std::int64_t kMaxTerms = 1'000'000;

// Window of Poisson(mean) terms around the mode whose relative mass is
// above 1e-22; everything outside is handled by anchored tail sums.
struct Window {
  std::int64_t lo = 0, hi = 0;     // inclusive
  std::vector<double> terms;       // pmf scaled so the mode is 1
  double below(std::int64_t t) const {  // scaled mass at indices < t
    double s = 0.0;
    for (std::int64_t j = lo; j < std::min(t, hi + 1); ++j)
      s += terms[static_cast<std::size_t>(j - lo)];
    return s;
  }
  double total() const {
    double s = 0.0;
    for (double v : terms) s += v;
    return s;
  }
};

Window poisson_window(double mean) {
  const auto mode = static_cast<std::int64_t>(std::floor(mean));
  constexpr double cutoff = 1e-22;
  std::vector<double> down, up;
  double v = 1.0;
  std::int64_t j = mode;
  while (j > 0 && v > cutoff && static_cast<std::int64_t>(down.size()) < kMaxTerms) {
    v *= static_cast<double>(j) / mean;
    down.push_back(v);
    --j;
  }
  std::int64_t lo = j;
  v = 1.0;
  j = mode;
  while (v > cutoff && static_cast<std::int64_t>(up.size()) < kMaxTerms) {
    v *= mean / static_cast<double>(j + 1);
    up.push_back(v);
    ++j;
  }
  Window w;
  w.lo = lo;
  w.hi = j;
  w.terms.reserve(down.size() + up.size() + 1);
  for (auto it = down.rbegin(); it != down.rend(); ++it) w.terms.push_back(*it);
  w.terms.push_back(1.0);
  for (double u : up) w.terms.push_back(u);
  return w;
}

double log_pmf(double mean, std::int64_t j) {
  return -mean + static_cast<double>(j) * std::log(mean) -
         std::lgamma(static_cast<double>(j) + 1.0);
}

// P(X < t) for t at or below the window: anchored downward sum.
double left_tail(double mean, std::int64_t t) {
  if (t <= 0) return 0.0;
  double anchor = log_pmf(mean, t - 1);
  double series = 1.0, term = 1.0;
  for (std::int64_t j = t - 1; j > 0 && term > 1e-20; --j) {
    term *= static_cast<double>(j) / mean;
    series += term;
  }
  return std::exp(anchor + std::log(series));
}

// P(X >= t) for t at or above the window: anchored upward sum.
double right_tail(double mean, std::int64_t t) {
  double anchor = log_pmf(mean, t);
  double series = 1.0, term = 1.0;
  for (std::int64_t j = t; term > 1e-20; ++j) {
    term *= mean / static_cast<double>(j + 1);
    series += term;
  }
  return std::exp(anchor + std::log(series));
}

}  // namespace

PoissonTail poisson_tail_below_ex(double mean, std::int64_t threshold) {
  if (!(mean > 0.0))
    throw std::invalid_argument("poisson tail needs mean > 0");
  if (threshold <= 0) return {0.0, true};
  // window would blow the term budget only for astronomically large means
  if (mean > 1e12) {
    double z = (static_cast<double>(threshold) - 0.5 - mean) / std::sqrt(mean);
    return {normal_cdf(z), false};
  }
  Window w = poisson_window(mean);
  if (threshold <= w.lo) return {left_tail(mean, threshold), true};
  if (threshold > w.hi) return {1.0 - right_tail(mean, threshold), true};
  return {w.below(threshold) / w.total(), true};
}

PoissonTail poisson_tail_above_ex(double mean, std::int64_t threshold) {
  if (!(mean > 0.0))
    throw std::invalid_argument("poisson tail needs mean > 0");
  if (threshold < 0) return {1.0, true};
  if (mean > 1e12) {
    double z = (static_cast<double>(threshold) + 0.5 - mean) / std::sqrt(mean);
    return {1.0 - normal_cdf(z), false};
  }
  Window w = poisson_window(mean);
  if (threshold + 1 > w.hi) return {right_tail(mean, threshold + 1), true};
  if (threshold + 1 <= w.lo) return {1.0 - left_tail(mean, threshold + 1), true};
  return {1.0 - w.below(threshold + 1) / w.total(), true};
}

double poisson_tail_below(double mean, std::int64_t threshold) {
  return poisson_tail_below_ex(mean, threshold).value;
}

double poisson_tail_above(double mean, std::int64_t threshold) {
  return poisson_tail_above_ex(mean, threshold).value;
}

double decay_map_value(int k, double D, double p, double y) {
  double logt = std::log(static_cast<double>(k - 1)) - y * D;
  double ratio;
  if (logt > 700.0) {
    ratio = std::exp(-logt);  // (1 - e^{-t})/t == 1/t here
  } else {
    double t = std::exp(logt);
    ratio = t < 1e-5 ? 1.0 - t / 2.0 + t * t / 6.0 : -std::expm1(-t) / t;
  }
  return p + ratio;
}

namespace {

IterationTrace run_iteration(double start, int max_steps, double tol,
                             const std::function<double(double)>& step) {
  if (max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
  IterationTrace trace;
  trace.values.push_back(start);
  double y = start;
  for (int i = 0; i < max_steps; ++i) {
    double next = step(y);
    if (!std::isfinite(next))
      throw std::runtime_error("fixed-point iteration produced a non-finite value");
    trace.values.push_back(next);
    if (std::fabs(next - y) < tol) {
      trace.converged = true;
      y = next;
      break;
    }
    y = next;
  }
  trace.limit_estimate = trace.values.back();
  return trace;
}

}  // namespace

IterationTrace iterate_decay_map(int k, double beta_star, std::int64_t delta,
                                 int max_steps, double tol) {
  auto params = threshold_params(k, beta_star);
  const double p = poisson_tail_below((k - 1) * params.D, delta);
  auto trace = run_iteration(1.0, max_steps, tol, [&](double y) {
    return decay_map_value(k, params.D, p, y);
  });
  trace.conclusion = trace.limit_estimate < 2.0 / k;
  return trace;
}

double reconstruction_map_value(int k, double D, double s, double x) {
  double base = -std::expm1(-x * D);  // 1 - e^{-xD}
  if (base <= 0.0) return -s;
  return std::exp((k - 1.0) * std::log(base)) - s;
}

IterationTrace iterate_reconstruction_map(int k, double beta_star,
                                          std::int64_t delta, int max_steps,
                                          double tol) {
  auto params = threshold_params(k, beta_star);
  const double s = poisson_tail_above((k - 1) * params.D, delta);
  auto trace = run_iteration(1.0, max_steps, tol, [&](double x) {
    return reconstruction_map_value(k, params.D, s, x);
  });
  const double target = 1.0 - 1.0 / std::log(static_cast<double>(k));
  trace.conclusion =
      *std::min_element(trace.values.begin(), trace.values.end()) >= target;
  return trace;
}

ContractionInfo contraction_coefficient(int k, double delta) {
  if (k < 2) throw std::invalid_argument("contraction_coefficient needs k >= 2");
  ContractionInfo info;
  info.coefficient = 13.0 * delta / (static_cast<double>(k) * k);
  info.hypothesis_holds =
      delta <= 2.0 * k * std::log(static_cast<double>(k));
  info.at_most_half = info.coefficient <= 0.5;
  return info;
}

ThresholdBounds threshold_bounds(int k) {
  if (k < 3) throw std::domain_error("threshold_bounds needs k >= 3");
  const double base = std::log(static_cast<double>(k)) +
                      std::log(std::log(static_cast<double>(k)));
  ThresholdBounds b;
  b.lower = k * (base + 1.0 - std::log(2.0));
  b.upper = k * (base + 1.0);
  return b;
}

bool ks_reconstructs(const Channel& channel, double delta) {
  if (!(delta >= 0.0)) throw std::invalid_argument("delta must be >= 0");
  const double lambda = second_eigenvalue(channel);
  return delta * lambda * lambda > 1.0;
}

bool uniqueness_holds(int k, int delta) {
  if (k < 2 || delta < 1)
    throw std::invalid_argument("uniqueness_holds needs k >= 2, delta >= 1");
  return k >= delta + 2;
}

}  // namespace recontree
