#include "recontree/runner.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "recontree/coupling.hpp"
#include "recontree/errors.hpp"
#include "recontree/rng.hpp"

namespace recontree {

Channel make_channel(const RunConfig& config) {
  if (config.channel == "colouring") return colouring_channel(config.k);
  if (config.channel == "bsc") return bsc_channel(config.epsilon);
  throw std::invalid_argument("unknown channel: " + config.channel);
}

TreeSpec make_tree(const RunConfig& config, double delta, int depth) {
  if (config.tree == "regular") {
    if (delta != std::floor(delta) || delta < 1)
      throw std::invalid_argument("regular tree needs an integer delta >= 1");
    return regular_tree(static_cast<int>(delta), depth);
  }
  if (config.tree == "gw_poisson") return gw_poisson_tree(delta, depth);
  throw std::invalid_argument("unknown tree kind: " + config.tree);
}

std::vector<ScanRow> run_scan(const RunConfig& config) {
  const Channel channel = make_channel(config);
  std::vector<ScanRow> rows;
  for (double delta : config.deltas) {
    for (int depth : config.depths) {
      ScanRow row;
      const TreeSpec tree = make_tree(config, delta, depth);
      row.report = simulate_report(channel, tree, config.trials,
                                   fold_seed(config.seed, rows.size()),
                                   config.threads);
      row.ks = ks_reconstructs(channel, delta);
      row.contraction = 13.0 * delta / (static_cast<double>(config.k) * config.k);
      if (channel.kind == ChannelKind::Colouring && config.k >= 3) {
        auto bounds = threshold_bounds(config.k);
        row.have_bounds = true;
        row.lower = bounds.lower;
        row.upper = bounds.upper;
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

json metadata_json(std::uint64_t seed) {
  json j;
  j["tool"] = "recontree";
  j["version"] = kVersion;
  j["seed"] = seed;
  return j;
}

namespace {

json config_json(const RunConfig& config) {
  json j;
  j["k"] = config.k;
  j["channel"] = config.channel;
  if (config.channel == "bsc") j["epsilon"] = config.epsilon;
  j["tree"] = config.tree;
  j["deltas"] = config.deltas;
  j["depths"] = config.depths;
  j["trials"] = config.trials;
  j["seed"] = config.seed;
  return j;
}

}  // namespace

void write_scan_csv(std::ostream& os, const RunConfig& config,
                    const std::vector<ScanRow>& rows) {
  os << "# recontree " << kVersion << "\n";
  os << "# config " << config_json(config).dump() << "\n";
  os << "k,delta,n,trials,x_n,x_n_se,z_n,z_n_se,p_n,p_n_se,tv,tv_se,"
        "ks_flag,lower_bound,upper_bound\n";
  for (const auto& row : rows) {
    const auto& r = row.report;
    os << r.k << ',' << format_double(r.tree.delta) << ',' << r.depth() << ','
       << r.trials << ',' << format_double(r.x_n.value) << ','
       << format_double(r.x_n.se) << ',' << format_double(r.z_n.value) << ','
       << format_double(r.z_n.se) << ',' << format_double(r.p_n.value) << ','
       << format_double(r.p_n.se) << ',' << format_double(r.tv.value) << ','
       << format_double(r.tv.se) << ',' << (row.ks ? 1 : 0) << ',';
    if (row.have_bounds)
      os << format_double(row.lower) << ',' << format_double(row.upper);
    else
      os << ',';
    os << '\n';
  }
}

json scan_to_json(const RunConfig& config, const std::vector<ScanRow>& rows) {
  json j;
  j["meta"] = metadata_json(config.seed);
  j["meta"]["config"] = config_json(config);
  j["meta"]["bounds_asymptotic_only"] = true;
  json out_rows = json::array();
  for (const auto& row : rows) {
    json r = report_to_json(row.report);
    r["ks_reconstructs"] = row.ks;
    r["contraction_coefficient"] = row.contraction;
    if (row.have_bounds) {
      r["lower_bound"] = row.lower;
      r["upper_bound"] = row.upper;
    } else {
      r["lower_bound"] = nullptr;
      r["upper_bound"] = nullptr;
    }
    out_rows.push_back(std::move(r));
  }
  j["rows"] = std::move(out_rows);
  return j;
}

VerifySummary run_verify(const VerifyConfig& config) {
  VerifySummary summary;
  auto add = [&](IdentityCheck check, const std::string& prefix) {
    check.name = prefix + "/" + check.name;
    if (check.applicable && !check.pass) summary.all_pass = false;
    summary.checks.push_back(std::move(check));
  };

  std::uint64_t stream = 0;
  auto next_seed = [&] { return fold_seed(config.seed, 0xF00D + stream++); };

  for (int k : {3, 4}) {
    const Channel channel = colouring_channel(k);
    for (int delta : {2, 3}) {
      for (int n : {1, 2}) {
        const std::string prefix = "k" + std::to_string(k) + "_d" +
                                   std::to_string(delta) + "_n" +
                                   std::to_string(n);
        const TreeSpec tree = regular_tree(delta, n);
        for (auto& c :
             verify_change_of_measure(channel, tree, config.trials, next_seed(),
                                      config.threads))
          add(std::move(c), prefix);
        const TreeSpec sample_tree = regular_tree(delta, n + 1);
        auto yz = verify_appendix_moments(channel, sample_tree, config.trials,
                                          next_seed(), config.threads);
        for (auto& c : yz.checks()) add(std::move(c), prefix);
        for (auto& c : check_z_bounds(yz, k, delta)) add(std::move(c), prefix);
      }
    }
  }

  // multinomial / Poisson coupling
  {
    auto rep = run_coupling_test(5, 20, 5.0, std::min<std::uint64_t>(config.trials, 100000),
                                 next_seed(), config.threads);
    IdentityCheck c;
    c.name = "coupling/dominance_violations";
    c.measured = static_cast<double>(rep.violations);
    c.predicted = 0.0;
    c.sigma = 0.0;
    c.pass = rep.violations == 0;
    add(std::move(c), "k5_d20");
    IdentityCheck pm;
    pm.name = "coupling/p_multinomial";
    pm.measured = rep.p_multinomial;
    pm.predicted = 1e-3;
    pm.pass = rep.p_multinomial > 1e-3;
    pm.note = "chi-square p-value must exceed 1e-3";
    add(std::move(pm), "k5_d20");
    IdentityCheck pp;
    pp.name = "coupling/p_poisson";
    pp.measured = rep.p_poisson;
    pp.predicted = 1e-3;
    pp.pass = rep.p_poisson > 1e-3;
    pp.note = "chi-square p-value must exceed 1e-3";
    add(std::move(pp), "k5_d20");
  }

  // posterior vs enumeration on sampled configurations
  {
    const std::uint64_t seed = next_seed();
    struct Cell {
      int k, delta, depth;
    };
    for (Cell cell : {Cell{2, 3, 2}, Cell{3, 2, 2}, Cell{3, 2, 3}, Cell{4, 2, 2}}) {
      const Channel channel = colouring_channel(cell.k);
      const TreeSpec tree = regular_tree(cell.delta, cell.depth);
      double worst = 0.0;
      for (std::uint64_t t = 0; t < 50; ++t) {
        auto cfg = sample_broadcast(channel, tree, std::nullopt, seed, t);
        auto bp = root_posterior(channel, cfg);
        auto oracle = enumerate_posterior(channel, cfg);
        for (int i = 0; i < cell.k; ++i)
          worst = std::max(worst, std::fabs(bp.probs[i] - oracle.probs[i]));
      }
      IdentityCheck c;
      c.name = "posterior_vs_enumeration/max_abs_diff";
      c.measured = worst;
      c.predicted = 0.0;
      c.sigma = 1e-10 / 4.0;  // gate at 1e-10
      c.pass = worst <= 1e-10;
      add(std::move(c), "k" + std::to_string(cell.k) + "_d" +
                            std::to_string(cell.delta) + "_n" +
                            std::to_string(cell.depth));
    }
  }

  // Galton-Watson spot check
  {
    const Channel channel = colouring_channel(3);
    const TreeSpec tree = gw_poisson_tree(2.0, 2);
    for (auto& c : verify_change_of_measure(channel, tree, config.trials,
                                            next_seed(), config.threads))
      add(std::move(c), "gw_k3_m2_n2");
  }

  return summary;
}

json verify_to_json(const VerifyConfig& config, const VerifySummary& summary) {
  json j;
  j["meta"] = metadata_json(config.seed);
  j["meta"]["trials"] = config.trials;
  json checks = json::array();
  for (const auto& c : summary.checks) checks.push_back(check_to_json(c));
  j["checks"] = std::move(checks);
  j["all_pass"] = summary.all_pass;
  return j;
}

}  // namespace recontree
