#include "recontree/estimators.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "recontree/rng.hpp"

namespace recontree {

namespace {

constexpr std::uint64_t kTagTv = 0xA11ED01;
constexpr std::uint64_t kTagXZ = 0xA11ED02;
constexpr std::uint64_t kTagBalance = 0xA11ED03;

void require_colouring(const Channel& channel, const char* op) {
  if (channel.kind != ChannelKind::Colouring)
    throw std::invalid_argument(std::string(op) +
                                " is defined for colouring channels");
}

void require_trials(std::uint64_t trials) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
}

MomentReport base_report(const Channel& channel, const TreeSpec& tree,
                         std::uint64_t trials, std::uint64_t seed) {
  MomentReport r;
  r.k = channel.k;
  r.tree = tree;
  r.trials = trials;
  r.seed = seed;
  return r;
}

}  // namespace

double MomentReport::nan_marker() {
  return std::numeric_limits<double>::quiet_NaN();
}

MomentReport estimate_xn_zn(const Channel& channel, const TreeSpec& tree,
                            std::uint64_t trials, std::uint64_t seed,
                            int threads) {
  require_colouring(channel, "estimate_xn_zn");
  require_trials(trials);
  const double inv_k = 1.0 / channel.k;
  auto sums = accumulate_trials(trials, threads, 2, [&](std::uint64_t t, double* out) {
    auto cfg = sample_broadcast(channel, tree, Colour{0}, seed, t);
    double xp = root_posterior(channel, cfg).probs[0];
    out[0] = xp;
    out[1] = (xp - inv_k) * (xp - inv_k);
  });
  auto report = base_report(channel, tree, trials, seed);
  report.x_n = sums.estimate(0);
  report.z_n = sums.estimate(1);
  return report;
}

MomentReport estimate_pn(const Channel& channel, const TreeSpec& tree,
                         std::uint64_t trials, std::uint64_t seed,
                         int threads) {
  require_colouring(channel, "estimate_pn");
  require_trials(trials);
  auto sums = accumulate_trials(trials, threads, 1, [&](std::uint64_t t, double* out) {
    auto cfg = sample_broadcast(channel, tree, Colour{0}, seed, t);
    out[0] = frozen_root(channel, cfg) ? 1.0 : 0.0;
  });
  auto report = base_report(channel, tree, trials, seed);
  double p = sums.mean(0);
  report.p_n = {p, std::sqrt(p * (1.0 - p) / static_cast<double>(trials))};
  return report;
}

MomentReport estimate_tv(const Channel& channel, const TreeSpec& tree,
                         std::uint64_t trials, std::uint64_t seed,
                         int threads) {
  require_colouring(channel, "estimate_tv");
  require_trials(trials);
  const double half_k = channel.k / 2.0;
  auto sums = accumulate_trials(trials, threads, 1, [&](std::uint64_t t, double* out) {
    auto cfg = sample_broadcast(channel, tree, std::nullopt, seed, t);
    auto belief = root_posterior(channel, cfg);
    out[0] = half_k * std::fabs(belief.probs[0] - belief.probs[1]);
  });
  auto report = base_report(channel, tree, trials, seed);
  report.tv = sums.estimate(0);
  return report;
}

MomentReport simulate_report(const Channel& channel, const TreeSpec& tree,
                             std::uint64_t trials, std::uint64_t seed,
                             int threads) {
  require_colouring(channel, "simulate_report");
  require_trials(trials);
  const double inv_k = 1.0 / channel.k;
  auto sums = accumulate_trials(trials, threads, 3, [&](std::uint64_t t, double* out) {
    auto cfg = sample_broadcast(channel, tree, Colour{0}, seed, t);
    double xp = root_posterior(channel, cfg).probs[0];
    out[0] = xp;
    out[1] = (xp - inv_k) * (xp - inv_k);
    out[2] = frozen_root(channel, cfg) ? 1.0 : 0.0;
  });
  auto report = base_report(channel, tree, trials, seed);
  report.x_n = sums.estimate(0);
  report.z_n = sums.estimate(1);
  double p = sums.mean(2);
  report.p_n = {p, std::sqrt(p * (1.0 - p) / static_cast<double>(trials))};
  report.tv = estimate_tv(channel, tree, trials, fold_seed(seed, kTagTv), threads).tv;
  return report;
}

std::vector<IdentityCheck> verify_change_of_measure(const Channel& channel,
                                                    const TreeSpec& tree,
                                                    std::uint64_t trials,
                                                    std::uint64_t seed,
                                                    int threads) {
  require_colouring(channel, "verify_change_of_measure");
  require_trials(trials);
  const int k = channel.k;
  const double inv_k = 1.0 / k;
  auto sums = accumulate_trials(trials, threads, 2, [&](std::uint64_t t, double* out) {
    auto cfg = sample_broadcast(channel, tree, Colour{0}, seed, t);
    auto belief = root_posterior(channel, cfg);
    double xp = belief.probs[0];
    double sumsq = 0.0, centred = 0.0;
    for (int i = 0; i < k; ++i) {
      sumsq += belief.probs[i] * belief.probs[i];
      centred += (belief.probs[i] - inv_k) * (belief.probs[i] - inv_k);
    }
    out[0] = xp - sumsq;
    out[1] = centred - (xp - inv_k);
  });
  std::vector<IdentityCheck> checks(2);
  checks[0].name = "change_of_measure/second_moment";
  checks[1].name = "change_of_measure/centred_moment";
  for (int i = 0; i < 2; ++i) {
    checks[i].measured = sums.mean(i);
    checks[i].predicted = 0.0;
    checks[i].sigma = sums.se(i);
    checks[i].pass = std::fabs(checks[i].measured) <= 4.0 * checks[i].sigma ||
                     checks[i].measured == 0.0;
  }
  return checks;
}

namespace {

// per-trial statistic columns for verify_appendix_moments
enum YZStat : std::size_t {
  kY1 = 0,     // avg_j Y_{1j}
  kY1Sq,       // avg_j Y_{1j}^2
  kYi,         // avg over wrong colours and j
  kYiSq,
  kZ1,         // prod_j (1 - Y_{1j})
  kZ1Sq,
  kZi,         // avg over wrong colours of Z_i
  kZiSq,
  kZSum,       // sum_i Z_i
  kZSumSq,
  kProdY12,    // avg_j Y_{1j} Y_{2j}
  kMeanY2,     // avg_j Y_{2j}
  kProdY23,    // avg_j Y_{2j} Y_{3j}   (k >= 3)
  kMeanY3,     // avg_j Y_{3j}          (k >= 3)
  kProdZ12,    // Z_1 Z_2
  kProdZ23,    // Z_2 Z_3               (k >= 3)
  kZ2,
  kZ3,
  kXPlusFull,  // full-tree posterior of the true colour
  kNumYZStats
};

struct Deriv {
  double gx = 0.0, gz = 0.0;
};

double prediction_se(const Deriv& d, double var_x, double var_z,
                     double cov_xz) {
  double v = d.gx * d.gx * var_x + d.gz * d.gz * var_z +
             2.0 * d.gx * d.gz * cov_xz;
  return v > 0.0 ? std::sqrt(v) : 0.0;
}

MeasuredPredicted compare(Estimate measured, double predicted,
                          double predicted_se) {
  MeasuredPredicted mp;
  mp.measured = measured;
  mp.predicted = {predicted, predicted_se};
  mp.sigma = std::sqrt(measured.se * measured.se + predicted_se * predicted_se);
  double diff = std::fabs(measured.value - predicted);
  mp.pass = mp.sigma > 0.0 ? diff <= 4.0 * mp.sigma : diff == 0.0;
  return mp;
}

// covariance estimate m_uv - m_u m_v with influence-function se
CovCheck cov_check(const TrialSums& sums, std::size_t uv, std::size_t u,
                   std::size_t v) {
  CovCheck c;
  const double mu = sums.mean(u), mv = sums.mean(v);
  c.value = sums.mean(uv) - mu * mv;
  double var_if = sums.cov(uv, uv) + mv * mv * sums.cov(u, u) +
                  mu * mu * sums.cov(v, v) - 2.0 * mv * sums.cov(uv, u) -
                  2.0 * mu * sums.cov(uv, v) + 2.0 * mu * mv * sums.cov(u, v);
  c.se = var_if > 0.0 ? std::sqrt(var_if / static_cast<double>(sums.trials())) : 0.0;
  c.pass = c.value <= 4.0 * c.se;
  return c;
}

// variance of a per-trial statistic, with se: needs columns for s and s^2
void variance_with_se(const TrialSums& sums, std::size_t s, std::size_t s2,
                      double& var_out, double& se_out) {
  const double m1 = sums.mean(s);
  var_out = sums.mean(s2) - m1 * m1;
  double var_if = sums.cov(s2, s2) + 4.0 * m1 * m1 * sums.cov(s, s) -
                  4.0 * m1 * sums.cov(s2, s);
  se_out = var_if > 0.0 ? std::sqrt(var_if / static_cast<double>(sums.trials())) : 0.0;
}

}  // namespace

std::vector<IdentityCheck> YZMomentReport::checks() const {
  std::vector<IdentityCheck> out;
  auto add_mp = [&](const char* name, const MeasuredPredicted& mp) {
    IdentityCheck c;
    c.name = name;
    c.measured = mp.measured.value;
    c.predicted = mp.predicted.value;
    c.sigma = mp.sigma;
    c.pass = mp.pass;
    out.push_back(std::move(c));
  };
  add_mp("appendix/mean_y1", mean_y1);
  add_mp("appendix/mean_y1_sq", mean_y1_sq);
  add_mp("appendix/mean_yi", mean_yi);
  add_mp("appendix/mean_yi_sq", mean_yi_sq);
  add_mp("appendix/mean_z1", mean_z1);
  add_mp("appendix/mean_z1_sq", mean_z1_sq);
  add_mp("appendix/mean_zi", mean_zi);
  add_mp("appendix/mean_zi_sq", mean_zi_sq);
  auto add_cov = [&](const char* name, const CovCheck& cc) {
    IdentityCheck c;
    c.name = name;
    c.measured = cc.value;
    c.predicted = 0.0;
    c.sigma = cc.se;
    c.pass = cc.pass;
    c.applicable = cc.applicable;
    c.note = "one-sided: must be <= 0";
    out.push_back(std::move(c));
  };
  add_cov("appendix/cov_y_true_other", cov_y_true_other);
  add_cov("appendix/cov_y_other_other", cov_y_other_other);
  add_cov("appendix/cov_z_true_other", cov_z_true_other);
  add_cov("appendix/cov_z_other_other", cov_z_other_other);
  out.push_back(balance);
  return out;
}

bool YZMomentReport::all_pass() const {
  for (const auto& c : checks())
    if (c.applicable && !c.pass) return false;
  return true;
}

YZMomentReport verify_appendix_moments(const Channel& channel,
                                       const TreeSpec& tree,
                                       std::uint64_t trials,
                                       std::uint64_t seed, int threads) {
  require_colouring(channel, "verify_appendix_moments");
  if (tree.kind != TreeKind::Regular)
    throw std::invalid_argument("verify_appendix_moments needs a regular tree");
  if (tree.depth < 1)
    throw std::invalid_argument("verify_appendix_moments needs depth >= 1");
  require_trials(trials);

  const int k = channel.k;
  const int delta = tree.branching();
  const double inv_k = 1.0 / k;

  YZMomentReport report;
  report.k = k;
  report.delta = delta;
  report.n = tree.depth - 1;
  report.trials = trials;
  report.seed = seed;

  // child-subtree moments, root conditioned to the first colour
  auto sums = accumulate_trials(trials, threads, kNumYZStats, [&](std::uint64_t t, double* out) {
    auto cfg = sample_broadcast(channel, tree, Colour{0}, seed, t);
    auto children = child_posteriors(channel, cfg);
    double ay1 = 0, ay1sq = 0, ayi = 0, ayisq = 0;
    double py12 = 0, my2 = 0, py23 = 0, my3 = 0;
    std::vector<double> log_z(static_cast<std::size_t>(k), 0.0);
    for (const auto& child : children) {
      const auto& y = child.probs;
      ay1 += y[0];
      ay1sq += y[0] * y[0];
      for (int i = 1; i < k; ++i) {
        ayi += y[i];
        ayisq += y[i] * y[i];
      }
      py12 += y[0] * y[1];
      my2 += y[1];
      if (k >= 3) {
        py23 += y[1] * y[2];
        my3 += y[2];
      }
      for (int i = 0; i < k; ++i)
        log_z[i] += y[i] < 1.0 ? std::log1p(-y[i])
                               : -std::numeric_limits<double>::infinity();
    }
    const double nj = static_cast<double>(children.size());
    std::vector<double> z(static_cast<std::size_t>(k));
    double zsum = 0.0;
    for (int i = 0; i < k; ++i) {
      z[i] = std::exp(log_z[i]);
      zsum += z[i];
    }
    double azi = 0, azisq = 0;
    for (int i = 1; i < k; ++i) {
      azi += z[i];
      azisq += z[i] * z[i];
    }
    out[kY1] = ay1 / nj;
    out[kY1Sq] = ay1sq / nj;
    out[kYi] = ayi / (nj * (k - 1));
    out[kYiSq] = ayisq / (nj * (k - 1));
    out[kZ1] = z[0];
    out[kZ1Sq] = z[0] * z[0];
    out[kZi] = azi / (k - 1);
    out[kZiSq] = azisq / (k - 1);
    out[kZSum] = zsum;
    out[kZSumSq] = zsum * zsum;
    out[kProdY12] = py12 / nj;
    out[kMeanY2] = my2 / nj;
    out[kProdY23] = k >= 3 ? py23 / nj : 0.0;
    out[kMeanY3] = k >= 3 ? my3 / nj : 0.0;
    out[kProdZ12] = z[0] * z[1];
    out[kProdZ23] = k >= 3 ? z[1] * z[2] : 0.0;
    out[kZ2] = z[1];
    out[kZ3] = k >= 3 ? z[2] : 0.0;
    out[kXPlusFull] = root_posterior(channel, cfg).probs[0];
  });

  // x_n, z_n at the subtree depth, independent stream
  TreeSpec subtree = tree;
  subtree.depth = tree.depth - 1;
  const std::uint64_t xz_seed = fold_seed(seed, kTagXZ);
  auto xz = accumulate_trials(trials, threads, 2, [&](std::uint64_t t, double* out) {
    auto cfg = sample_broadcast(channel, subtree, Colour{0}, xz_seed, t);
    double xp = root_posterior(channel, cfg).probs[0];
    out[0] = xp;
    out[1] = (xp - inv_k) * (xp - inv_k);
  });
  report.x_n = xz.estimate(0);
  report.z_n = xz.estimate(1);
  const double x = report.x_n.value;
  const double z = report.z_n.value;
  const double xq = x - inv_k;
  const double var_x = xz.mean_cov(0, 0);
  const double var_z = xz.mean_cov(1, 1);
  const double cov_xz = xz.mean_cov(0, 1);

  const double km1 = k - 1.0;
  struct Pred {
    double value;
    Deriv d;
  };
  auto pred_y1 = [&] {
    return Pred{inv_k - xq / km1, {-1.0 / km1, 0.0}};
  }();
  auto pred_y1sq = [&] {
    return Pred{inv_k * inv_k + (k - 2.0) / (k * km1) * xq - z / km1,
                {(k - 2.0) / (k * km1), -1.0 / km1}};
  }();
  auto pred_yi = [&] {
    return Pred{inv_k + xq / (km1 * km1), {1.0 / (km1 * km1), 0.0}};
  }();
  auto pred_yisq = [&] {
    double coef = (static_cast<double>(k) * k - 2.0 * k + 2.0) / (k * km1 * km1);
    return Pred{inv_k * inv_k + coef * xq + z / (km1 * km1),
                {coef, 1.0 / (km1 * km1)}};
  }();
  // Z moments are delta-th powers of affine forms in (x, z)
  auto power_pred = [&](double base, double cx, double cz) {
    double inner = base + cx * xq + cz * z;
    double value = std::pow(inner, delta);
    double dful = delta * std::pow(inner, delta - 1);
    return Pred{value, {dful * cx, dful * cz}};
  };
  auto pred_z1 = power_pred(km1 / k, 1.0 / km1, 0.0);
  auto pred_z1sq = power_pred((km1 / k) * (km1 / k),
                              (3.0 * k - 2.0) / (k * km1), -1.0 / km1);
  auto pred_zi = power_pred(km1 / k, -1.0 / (km1 * km1), 0.0);
  auto pred_zisq = power_pred((km1 / k) * (km1 / k),
                              (static_cast<double>(k) * k - 4.0 * k + 2.0) /
                                  (k * km1 * km1),
                              1.0 / (km1 * km1));

  auto mp = [&](std::size_t stat, const Pred& p) {
    return compare(sums.estimate(stat), p.value,
                   prediction_se(p.d, var_x, var_z, cov_xz));
  };
  report.mean_y1 = mp(kY1, pred_y1);
  report.mean_y1_sq = mp(kY1Sq, pred_y1sq);
  report.mean_yi = mp(kYi, pred_yi);
  report.mean_yi_sq = mp(kYiSq, pred_yisq);
  report.mean_z1 = mp(kZ1, pred_z1);
  report.mean_z1_sq = mp(kZ1Sq, pred_z1sq);
  report.mean_zi = mp(kZi, pred_zi);
  report.mean_zi_sq = mp(kZiSq, pred_zisq);

  report.cov_y_true_other = cov_check(sums, kProdY12, kY1, kMeanY2);
  report.cov_z_true_other = cov_check(sums, kProdZ12, kZ1, kZ2);
  if (k >= 3) {
    report.cov_y_other_other = cov_check(sums, kProdY23, kMeanY2, kMeanY3);
    report.cov_z_other_other = cov_check(sums, kProdZ23, kZ2, kZ3);
  } else {
    report.cov_y_other_other.applicable = false;
    report.cov_y_other_other.pass = true;
    report.cov_z_other_other.applicable = false;
    report.cov_z_other_other.pass = true;
  }

  report.zsum_mean = sums.estimate(kZSum);
  variance_with_se(sums, kZ1, kZ1Sq, report.z1_var, report.z1_var_se);
  variance_with_se(sums, kZSum, kZSumSq, report.zsum_var, report.zsum_var_se);

  // E[X+] + (k-1) E[X-] = 1, with X- from a stream conditioned on a
  // wrong root colour
  const std::uint64_t minus_seed = fold_seed(seed, kTagBalance);
  auto minus_sums = accumulate_trials(trials, threads, 1, [&](std::uint64_t t, double* out) {
    auto cfg = sample_broadcast(channel, tree, Colour{1}, minus_seed, t);
    out[0] = root_posterior(channel, cfg).probs[0];
  });
  Estimate xplus = sums.estimate(kXPlusFull);
  Estimate xminus = minus_sums.estimate(0);
  report.balance.name = "appendix/balance_x_plus_minus";
  report.balance.measured = xplus.value + km1 * xminus.value;
  report.balance.predicted = 1.0;
  report.balance.sigma = std::sqrt(xplus.se * xplus.se +
                                   km1 * km1 * xminus.se * xminus.se);
  report.balance.pass =
      std::fabs(report.balance.measured - 1.0) <= 4.0 * report.balance.sigma;
  return report;
}

std::vector<IdentityCheck> check_z_bounds(const YZMomentReport& report, int k,
                                          int delta) {
  std::vector<IdentityCheck> checks(4);
  checks[0].name = "z_bounds/z1_mean";
  checks[1].name = "z_bounds/zi_mean";
  checks[2].name = "z_bounds/z1_var";
  checks[3].name = "z_bounds/zsum_var";

  const double inv_k = 1.0 / k;
  const double x = report.x_n.value;
  const bool hypotheses =
      delta <= 2.0 * k * std::log(static_cast<double>(k)) && x <= 2.0 * inv_k;
  if (!hypotheses) {
    for (auto& c : checks) {
      c.applicable = false;
      c.pass = true;
      c.note = "hypotheses not met (needs delta <= 2k log k and x_n <= 2/k)";
    }
    return checks;
  }

  const double xq = x - inv_k;
  const double se_x = report.x_n.se;
  const double r = std::pow((k - 1.0) / k, delta);
  const double r2 = r * r;

  {
    auto& c = checks[0];
    double lo = r;
    double hi = r * (1.0 + 2.0 * delta / static_cast<double>(k) * xq);
    double hi_se = r * 2.0 * delta / static_cast<double>(k) * se_x;
    double m = report.mean_z1.measured.value;
    double m_se = report.mean_z1.measured.se;
    c.measured = m;
    c.predicted = hi;
    c.sigma = std::sqrt(m_se * m_se + hi_se * hi_se);
    c.pass = m >= lo - 4.0 * m_se && m <= hi + 4.0 * c.sigma;
    c.note = "bound interval [" + std::to_string(lo) + ", " + std::to_string(hi) + "]";
  }
  {
    auto& c = checks[1];
    double lo = r * (1.0 - 2.0 * delta / (static_cast<double>(k) * k) * xq);
    double lo_se = r * 2.0 * delta / (static_cast<double>(k) * k) * se_x;
    double hi = r;
    double m = report.mean_zi.measured.value;
    double m_se = report.mean_zi.measured.se;
    c.measured = m;
    c.predicted = hi;
    c.sigma = std::sqrt(m_se * m_se + lo_se * lo_se);
    c.pass = m >= lo - 4.0 * c.sigma && m <= hi + 4.0 * m_se;
    c.note = "bound interval [" + std::to_string(lo) + ", " + std::to_string(hi) + "]";
  }
  {
    auto& c = checks[2];
    double hi = r2 * 4.0 * delta / static_cast<double>(k) * xq;
    double hi_se = r2 * 4.0 * delta / static_cast<double>(k) * se_x;
    c.measured = report.z1_var;
    c.predicted = hi;
    c.sigma = std::sqrt(report.z1_var_se * report.z1_var_se + hi_se * hi_se);
    c.pass = c.measured <= hi + 4.0 * c.sigma;
  }
  {
    auto& c = checks[3];
    double hi = r2 * 4.0 * delta * xq;
    double hi_se = r2 * 4.0 * delta * se_x;
    c.measured = report.zsum_var;
    c.predicted = hi;
    c.sigma = std::sqrt(report.zsum_var_se * report.zsum_var_se + hi_se * hi_se);
    c.pass = c.measured <= hi + 4.0 * c.sigma;
  }
  return checks;
}

}  // namespace recontree
