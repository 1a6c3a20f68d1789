#include "recontree/coupling.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "recontree/rng.hpp"
#include "recontree/stats.hpp"

namespace recontree {

CoupledCounts sample_coupled(int k, int delta, double D, std::uint64_t seed,
                             std::uint64_t trial) {
  if (k < 2) throw std::invalid_argument("sample_coupled needs k >= 2");
  if (delta < 0) throw std::invalid_argument("sample_coupled needs delta >= 0");
  if (!(D > 0.0)) throw std::invalid_argument("sample_coupled needs D > 0");

  const int cells = k - 1;
  VertexRng rng(seed, trial, 0);

  long total_poisson = 0;
  for (int i = 0; i < cells; ++i) total_poisson += poisson_sample(D, rng);

  CoupledCounts out;
  out.multinomial.assign(cells, 0);
  out.poisson.assign(cells, 0);

  // shared balls realize both multinomials; the excess goes only to the
  // vector with the larger total
  const long joint = std::min<long>(delta, total_poisson);
  for (long b = 0; b < joint; ++b) {
    auto cell = static_cast<std::size_t>(rng.next_below(cells));
    ++out.multinomial[cell];
    ++out.poisson[cell];
  }
  if (total_poisson > delta) {
    for (long b = 0; b < total_poisson - delta; ++b)
      ++out.poisson[static_cast<std::size_t>(rng.next_below(cells))];
  } else {
    for (long b = 0; b < delta - total_poisson; ++b)
      ++out.multinomial[static_cast<std::size_t>(rng.next_below(cells))];
  }

  out.dominated = true;
  for (int i = 0; i < cells; ++i) {
    if (total_poisson >= delta && out.multinomial[i] > out.poisson[i])
      out.dominated = false;
    if (total_poisson <= delta && out.multinomial[i] < out.poisson[i])
      out.dominated = false;
  }
  return out;
}

CouplingTestReport run_coupling_test(int k, int delta, double D,
                                     std::uint64_t trials, std::uint64_t seed,
                                     int threads) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  const int cells = k - 1;

  // histogram caps: multinomial coordinate lives in [0, delta]; the
  // Poisson coordinate beyond the cap lands in the overflow bucket
  const std::size_t pois_cap =
      static_cast<std::size_t>(std::ceil(D + 12.0 * std::sqrt(D) + 20.0));
  const std::size_t mult_cells = static_cast<std::size_t>(delta) + 1;

  struct Local {
    std::uint64_t violations = 0;
    std::vector<std::uint64_t> mult, pois;
  };

  const int nworkers = resolve_threads(threads);
  constexpr std::uint64_t kChunk = 4096;
  const std::uint64_t nchunks = (trials + kChunk - 1) / kChunk;
  std::vector<Local> chunk_out(nchunks);
  std::atomic<std::uint64_t> next{0};

  auto worker = [&]() {
    for (;;) {
      std::uint64_t c = next.fetch_add(1);
      if (c >= nchunks) break;
      Local local;
      local.mult.assign(mult_cells, 0);
      local.pois.assign(pois_cap + 1, 0);
      const std::uint64_t lo = c * kChunk;
      const std::uint64_t hi = std::min(trials, lo + kChunk);
      for (std::uint64_t t = lo; t < hi; ++t) {
        auto cc = sample_coupled(k, delta, D, seed, t);
        if (!cc.dominated) ++local.violations;
        ++local.mult[static_cast<std::size_t>(cc.multinomial[0])];
        ++local.pois[std::min<std::size_t>(cc.poisson[0], pois_cap)];
      }
      chunk_out[c] = std::move(local);
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < nworkers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  CouplingTestReport report;
  report.trials = trials;
  std::vector<double> mult_obs(mult_cells, 0.0), pois_obs(pois_cap + 1, 0.0);
  for (const auto& local : chunk_out) {
    if (local.mult.empty()) continue;
    report.violations += local.violations;
    for (std::size_t i = 0; i < mult_cells; ++i) mult_obs[i] += local.mult[i];
    for (std::size_t i = 0; i <= pois_cap; ++i) pois_obs[i] += local.pois[i];
  }

  // expected counts: Binomial(delta, 1/cells) and Poisson(D)
  std::vector<double> mult_exp(mult_cells, 0.0), pois_exp(pois_cap + 1, 0.0);
  const double logp = -std::log(static_cast<double>(cells));
  const double logq = std::log1p(-1.0 / cells);
  for (std::size_t j = 0; j < mult_cells; ++j) {
    double lg = std::lgamma(delta + 1.0) - std::lgamma(j + 1.0) -
                std::lgamma(delta - static_cast<double>(j) + 1.0);
    mult_exp[j] = std::exp(lg + static_cast<double>(j) * logp +
                           (delta - static_cast<double>(j)) * logq) *
                  static_cast<double>(trials);
  }
  double tail = static_cast<double>(trials);
  for (std::size_t j = 0; j < pois_cap; ++j) {
    pois_exp[j] = std::exp(-D + static_cast<double>(j) * std::log(D) -
                           std::lgamma(static_cast<double>(j) + 1.0)) *
                  static_cast<double>(trials);
    tail -= pois_exp[j];
  }
  pois_exp[pois_cap] = std::max(tail, 0.0);

  report.p_multinomial = chi_square_gof_pvalue(mult_obs, mult_exp);
  report.p_poisson = chi_square_gof_pvalue(pois_obs, pois_exp);
  return report;
}

}  // namespace recontree
