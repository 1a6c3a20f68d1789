// Command-line front end: simulation scans, fixed-point runs and the
// verification bundle.  Exit codes: 0 success, 1 check failure,
// 2 configuration error, 3 I/O error.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "recontree/coupling.hpp"
#include "recontree/errors.hpp"
#include "recontree/runner.hpp"

namespace rt = recontree;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("RECON_SEED")) {
    char* end = nullptr;
    std::uint64_t v = std::strtoull(env, &end, 10);
    if (end && *end == '\0') return v;
    std::cerr << "warning: ignoring non-numeric RECON_SEED\n";
  }
  return rt::kDefaultSeed;
}

int write_output(const std::string& path, const std::string& body) {
  if (path.empty() || path == "-") {
    std::cout << body;
    return kExitOk;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    std::cerr << "error: cannot open " << path << " for writing\n";
    return kExitIo;
  }
  os << body;
  if (!os.good()) {
    std::cerr << "error: write to " << path << " failed\n";
    return kExitIo;
  }
  return kExitOk;
}

struct GridFlags {
  double delta = 2.0;
  std::optional<double> delta_min, delta_max;
  double delta_step = 1.0;
  int depth = 1;
  std::optional<int> depth_min, depth_max;

  void register_on(CLI::App* cmd, bool range) {
    cmd->add_option("--delta", delta, "branching factor (or GW mean)");
    cmd->add_option("--depth,--n", depth, "tree depth n");
    if (range) {
      cmd->add_option("--delta-min", delta_min);
      cmd->add_option("--delta-max", delta_max);
      cmd->add_option("--delta-step", delta_step);
      cmd->add_option("--depth-min", depth_min);
      cmd->add_option("--depth-max", depth_max);
    }
  }

  std::vector<double> deltas() const {
    if (!delta_min && !delta_max) return {delta};
    double lo = delta_min.value_or(delta);
    double hi = delta_max.value_or(lo);
    std::vector<double> out;
    for (double d = lo; d <= hi + 1e-12; d += delta_step) out.push_back(d);
    return out;
  }

  std::vector<int> depths() const {
    if (!depth_min && !depth_max) return {depth};
    int lo = depth_min.value_or(depth);
    int hi = depth_max.value_or(lo);
    std::vector<int> out;
    for (int n = lo; n <= hi; ++n) out.push_back(n);
    return out;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"broadcast colouring models on trees: simulation, exact root "
               "posteriors and analytic threshold maps"};
  app.require_subcommand(1);

  rt::RunConfig config;
  config.seed = default_seed();
  std::string out_path;

  // ---- simulate / scan -------------------------------------------------
  GridFlags sim_grid, scan_grid;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--k", config.k, "colour count");
    cmd->add_option("--channel", config.channel, "colouring|bsc");
    cmd->add_option("--epsilon", config.epsilon, "bsc flip probability");
    cmd->add_option("--tree", config.tree, "regular|gw_poisson");
    cmd->add_option("--trials", config.trials, "Monte Carlo trials");
    cmd->add_option("--seed", config.seed, "master seed (env RECON_SEED)");
    cmd->add_option("--threads", config.threads, "worker count (0 = auto)");
    cmd->add_option("--format", config.format, "csv|json");
    cmd->add_option("--out,-o", out_path, "output path (default stdout)");
  };

  auto* simulate = app.add_subcommand("simulate", "one (k, delta, n) estimate");
  add_common(simulate);
  sim_grid.register_on(simulate, false);

  auto* scan = app.add_subcommand("scan", "sweep a (delta, depth) grid");
  add_common(scan);
  scan_grid.register_on(scan, true);

  // ---- fixpoint ---------------------------------------------------------
  auto* fixpoint = app.add_subcommand("fixpoint", "scalar fixed-point maps");
  int fp_k = 10000;
  double fp_beta_star = 0.25;
  std::int64_t fp_delta = 0;
  bool fp_delta_auto = false;
  std::string fp_map = "g";
  double fp_tol = 1e-12;
  int fp_max_steps = 10000;
  fixpoint->add_option("--k", fp_k, "colour count (k >= 3)");
  fixpoint->add_option("--beta-star", fp_beta_star, "offset in D");
  fixpoint->add_option("--delta", fp_delta, "branching factor");
  fixpoint->add_flag("--delta-auto", fp_delta_auto, "use floor(k*D)");
  fixpoint->add_option("--map", fp_map, "g|recon");
  fixpoint->add_option("--tol", fp_tol, "convergence tolerance");
  fixpoint->add_option("--max-steps", fp_max_steps);
  fixpoint->add_option("--out,-o", out_path);

  // ---- bounds -----------------------------------------------------------
  auto* bounds = app.add_subcommand("bounds", "threshold calculators");
  int b_k = 3;
  double b_delta = 2;
  std::string b_channel = "colouring";
  double b_epsilon = 0.25;
  bounds->add_option("--k", b_k);
  bounds->add_option("--delta", b_delta);
  bounds->add_option("--channel", b_channel, "colouring|bsc");
  bounds->add_option("--epsilon", b_epsilon);
  bounds->add_option("--out,-o", out_path);

  // ---- posterior ---------------------------------------------------------
  auto* posterior = app.add_subcommand("posterior",
                                       "root belief of a leaf configuration");
  std::string post_in = "-";
  int post_k = 3;
  std::string post_channel = "colouring";
  double post_epsilon = 0.25;
  posterior->add_option("--in", post_in, "leaf config JSON (- for stdin)");
  posterior->add_option("--k", post_k);
  posterior->add_option("--channel", post_channel, "colouring|bsc");
  posterior->add_option("--epsilon", post_epsilon);
  posterior->add_option("--out,-o", out_path);

  // ---- verify-moments ----------------------------------------------------
  auto* vm = app.add_subcommand("verify-moments",
                                "moment identities for one instance");
  int vm_k = 3, vm_delta = 2, vm_n = 1, vm_threads = 0;
  std::uint64_t vm_trials = 100000, vm_seed = default_seed();
  vm->add_option("--k", vm_k);
  vm->add_option("--delta", vm_delta);
  vm->add_option("--n", vm_n, "subtree depth (samples use depth n+1)");
  vm->add_option("--trials", vm_trials);
  vm->add_option("--seed", vm_seed);
  vm->add_option("--threads", vm_threads);
  vm->add_option("--out,-o", out_path);

  // ---- coupling-test -----------------------------------------------------
  auto* ct = app.add_subcommand("coupling-test",
                                "multinomial/Poisson dominance coupling");
  int ct_k = 5, ct_delta = 20, ct_threads = 0;
  double ct_d = 5.0;
  std::uint64_t ct_trials = 1000000, ct_seed = default_seed();
  ct->add_option("--k", ct_k);
  ct->add_option("--delta", ct_delta);
  ct->add_option("--d", ct_d, "Poisson rate D");
  ct->add_option("--trials", ct_trials);
  ct->add_option("--seed", ct_seed);
  ct->add_option("--threads", ct_threads);
  ct->add_option("--out,-o", out_path);

  // ---- verify --------------------------------------------------------------
  auto* verify = app.add_subcommand("verify", "desk-scale verification bundle");
  rt::VerifyConfig verify_config;
  verify_config.seed = default_seed();
  verify->add_option("--trials", verify_config.trials);
  verify->add_option("--seed", verify_config.seed);
  verify->add_option("--threads", verify_config.threads);
  verify->add_option("--out,-o", out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (simulate->parsed() || scan->parsed()) {
      if (simulate->parsed()) {
        config.deltas = {sim_grid.delta};
        config.depths = {sim_grid.depth};
      } else {
        config.deltas = scan_grid.deltas();
        config.depths = scan_grid.depths();
      }
      auto rows = rt::run_scan(config);
      std::ostringstream body;
      if (config.format == "json")
        body << rt::scan_to_json(config, rows).dump(2) << "\n";
      else
        rt::write_scan_csv(body, config, rows);
      return write_output(out_path, body.str());
    }
    if (fixpoint->parsed()) {
      auto params = rt::threshold_params(fp_k, fp_beta_star);
      if (fp_delta_auto)
        fp_delta = static_cast<std::int64_t>(std::floor(fp_k * params.D));
      if (fp_delta <= 0)
        throw std::invalid_argument("fixpoint needs --delta > 0 or --delta-auto");
      rt::IterationTrace trace;
      if (fp_map == "g")
        trace = rt::iterate_decay_map(fp_k, fp_beta_star, fp_delta,
                                      fp_max_steps, fp_tol);
      else if (fp_map == "recon")
        trace = rt::iterate_reconstruction_map(fp_k, fp_beta_star, fp_delta,
                                               fp_max_steps, fp_tol);
      else
        throw std::invalid_argument("--map must be g or recon");
      std::ostringstream body;
      body << "# recontree " << rt::kVersion << "\n";
      body << "# map=" << fp_map << " k=" << fp_k
           << " beta_star=" << rt::format_double(fp_beta_star)
           << " delta=" << fp_delta << " D=" << rt::format_double(params.D)
           << "\n";
      body << "# converged=" << (trace.converged ? 1 : 0)
           << " limit=" << rt::format_double(trace.limit_estimate)
           << " conclusion=" << (trace.conclusion ? 1 : 0) << "\n";
      body << "step,value\n";
      for (std::size_t i = 0; i < trace.values.size(); ++i)
        body << i << ',' << rt::format_double(trace.values[i]) << "\n";
      return write_output(out_path, body.str());
    }
    if (bounds->parsed()) {
      rt::json j;
      j["meta"] = rt::metadata_json(default_seed());
      j["k"] = b_k;
      j["delta"] = b_delta;
      rt::Channel channel = b_channel == "bsc" ? rt::bsc_channel(b_epsilon)
                                               : rt::colouring_channel(b_k);
      j["channel"] = rt::channel_to_json(channel);
      j["lambda2"] = rt::second_eigenvalue(channel);
      j["ks_reconstructs"] = rt::ks_reconstructs(channel, b_delta);
      if (channel.kind == rt::ChannelKind::Colouring && b_k >= 3) {
        auto tb = rt::threshold_bounds(b_k);
        j["lower_bound"] = tb.lower;
        j["upper_bound"] = tb.upper;
        j["bounds_asymptotic_only"] = true;
      } else {
        j["lower_bound"] = nullptr;
        j["upper_bound"] = nullptr;
      }
      if (channel.kind == rt::ChannelKind::Colouring &&
          b_delta == std::floor(b_delta) && b_delta >= 1)
        j["uniqueness_holds"] =
            rt::uniqueness_holds(b_k, static_cast<int>(b_delta));
      else
        j["uniqueness_holds"] = nullptr;
      return write_output(out_path, j.dump(2) + "\n");
    }
    if (posterior->parsed()) {
      rt::json j;
      if (post_in == "-") {
        j = rt::json::parse(std::cin);
      } else {
        std::ifstream is(post_in);
        if (!is) {
          std::cerr << "error: cannot read " << post_in << "\n";
          return kExitIo;
        }
        j = rt::json::parse(is);
      }
      rt::Channel channel = post_channel == "bsc"
                                ? rt::bsc_channel(post_epsilon)
                                : rt::colouring_channel(post_k);
      auto cfg = rt::leaf_config_from_json(j);
      auto belief = rt::root_posterior(channel, cfg);
      return write_output(out_path, rt::belief_to_json(belief).dump() + "\n");
    }
    if (vm->parsed()) {
      rt::Channel channel = rt::colouring_channel(vm_k);
      rt::TreeSpec tree = rt::regular_tree(vm_delta, vm_n);
      rt::json checks = rt::json::array();
      bool all_pass = true;
      auto take = [&](const rt::IdentityCheck& c) {
        checks.push_back(rt::check_to_json(c));
        if (c.applicable && !c.pass) all_pass = false;
      };
      for (auto& c : rt::verify_change_of_measure(channel, tree, vm_trials,
                                                  vm_seed, vm_threads))
        take(c);
      auto yz = rt::verify_appendix_moments(channel,
                                            rt::regular_tree(vm_delta, vm_n + 1),
                                            vm_trials, vm_seed, vm_threads);
      for (auto& c : yz.checks()) take(c);
      for (auto& c : rt::check_z_bounds(yz, vm_k, vm_delta)) take(c);
      rt::json out;
      out["meta"] = rt::metadata_json(vm_seed);
      out["report"] = rt::yz_report_to_json(yz);
      out["checks"] = std::move(checks);
      out["all_pass"] = all_pass;
      int io = write_output(out_path, out.dump(2) + "\n");
      if (io != kExitOk) return io;
      return all_pass ? kExitOk : kExitCheckFailed;
    }
    if (ct->parsed()) {
      auto rep = rt::run_coupling_test(ct_k, ct_delta, ct_d, ct_trials, ct_seed,
                                       ct_threads);
      rt::json j;
      j["meta"] = rt::metadata_json(ct_seed);
      j["trials"] = rep.trials;
      j["violations"] = rep.violations;
      j["p_multinomial"] = rep.p_multinomial;
      j["p_poisson"] = rep.p_poisson;
      bool pass = rep.violations == 0 && rep.p_multinomial > 1e-3 &&
                  rep.p_poisson > 1e-3;
      j["all_pass"] = pass;
      int io = write_output(out_path, j.dump(2) + "\n");
      if (io != kExitOk) return io;
      return pass ? kExitOk : kExitCheckFailed;
    }
    if (verify->parsed()) {
      auto summary = rt::run_verify(verify_config);
      int io = write_output(out_path,
                            rt::verify_to_json(verify_config, summary).dump(2) +
                                "\n");
      if (io != kExitOk) return io;
      return summary.all_pass ? kExitOk : kExitCheckFailed;
    }
  } catch (const rt::ZeroProbabilityBoundary& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  } catch (const rt::InstanceTooLarge& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const rt::json::exception& e) {
    std::cerr << "error: bad input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
