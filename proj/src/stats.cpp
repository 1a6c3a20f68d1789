#include "recontree/stats.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace recontree {

double TrialSums::cov(std::size_t i, std::size_t j) const {
  if (trials_ < 2) return 0.0;
  const double n = static_cast<double>(trials_);
  double c = cross_[i * nstats_ + j] - sum_[i] * sum_[j] / n;
  return c / (n - 1.0);
}

double TrialSums::se(std::size_t i) const {
  if (trials_ < 2) return 0.0;
  double v = var(i);
  return v > 0.0 ? std::sqrt(v / trials_) : 0.0;
}

double TrialSums::mean_cov(std::size_t i, std::size_t j) const {
  return cov(i, j) / trials_;
}

void TrialSums::add(const double* stats) {
  for (std::size_t i = 0; i < nstats_; ++i) {
    sum_[i] += stats[i];
    for (std::size_t j = i; j < nstats_; ++j)
      cross_[i * nstats_ + j] += stats[i] * stats[j];
  }
}

void TrialSums::merge(const TrialSums& other) {
  for (std::size_t i = 0; i < nstats_; ++i) sum_[i] += other.sum_[i];
  for (std::size_t i = 0; i < cross_.size(); ++i) cross_[i] += other.cross_[i];
}

int resolve_threads(int threads) {
  if (threads > 0) return threads;
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

TrialSums accumulate_trials(std::uint64_t trials, int threads,
                            std::size_t nstats,
                            const std::function<void(std::uint64_t, double*)>& trial_fn) {
  if (trials == 0) throw std::invalid_argument("trials must be >= 1");
  constexpr std::uint64_t kChunk = 512;
  const std::uint64_t nchunks = (trials + kChunk - 1) / kChunk;
  const int nworkers =
      static_cast<int>(std::min<std::uint64_t>(resolve_threads(threads), nchunks));

  std::vector<TrialSums> chunk_sums(nchunks, TrialSums(0, nstats));
  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&]() {
    std::vector<double> stats(nstats);
    for (;;) {
      std::uint64_t c = next.fetch_add(1);
      if (c >= nchunks || failed.load()) break;
      TrialSums local(0, nstats);
      const std::uint64_t lo = c * kChunk;
      const std::uint64_t hi = std::min(trials, lo + kChunk);
      try {
        for (std::uint64_t t = lo; t < hi; ++t) {
          trial_fn(t, stats.data());
          local.add(stats.data());
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!failed.exchange(true)) error = std::current_exception();
        break;
      }
      chunk_sums[c] = std::move(local);
    }
  };

  if (nworkers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nworkers);
    for (int w = 0; w < nworkers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failed.load()) std::rethrow_exception(error);

  TrialSums total(trials, nstats);
  for (std::uint64_t c = 0; c < nchunks; ++c) total.merge(chunk_sums[c]);
  return total;
}

namespace {

// Regularized incomplete gamma by series / continued fraction.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q domain");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_contfrac(a, x);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double chi_square_gof_pvalue(const std::vector<double>& observed,
                             const std::vector<double>& expected,
                             double min_expected) {
  if (observed.size() != expected.size() || observed.empty())
    throw std::invalid_argument("chi_square_gof_pvalue: size mismatch");
  std::vector<double> obs, exp;
  double o_acc = 0.0, e_acc = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    o_acc += observed[i];
    e_acc += expected[i];
    if (e_acc >= min_expected) {
      obs.push_back(o_acc);
      exp.push_back(e_acc);
      o_acc = e_acc = 0.0;
    }
  }
  if (e_acc > 0.0 || o_acc > 0.0) {
    if (exp.empty()) {
      obs.push_back(o_acc);
      exp.push_back(e_acc);
    } else {
      obs.back() += o_acc;
      exp.back() += e_acc;
    }
  }
  if (exp.size() < 2) return 1.0;
  double stat = 0.0;
  for (std::size_t i = 0; i < exp.size(); ++i) {
    double d = obs[i] - exp[i];
    stat += d * d / exp[i];
  }
  double dof = static_cast<double>(exp.size() - 1);
  return gamma_q(dof / 2.0, stat / 2.0);
}

}  // namespace recontree
