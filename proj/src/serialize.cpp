#include "recontree/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace recontree {

json channel_to_json(const Channel& channel) {
  json j;
  switch (channel.kind) {
    case ChannelKind::Colouring:
      j["kind"] = "colouring";
      j["k"] = channel.k;
      break;
    case ChannelKind::Bsc:
      j["kind"] = "bsc";
      j["epsilon"] = channel.epsilon;
      break;
    case ChannelKind::General:
      j["kind"] = "general";
      j["k"] = channel.k;
      j["matrix"] = channel.matrix;
      break;
  }
  return j;
}

Channel channel_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "colouring") return colouring_channel(j.at("k").get<int>());
  if (kind == "bsc") return bsc_channel(j.at("epsilon").get<double>());
  if (kind == "general")
    return channel_from_matrix(j.at("k").get<int>(),
                               j.at("matrix").get<std::vector<double>>());
  throw std::invalid_argument("unknown channel kind: " + kind);
}

json tree_to_json(const TreeSpec& tree) {
  json j;
  if (tree.kind == TreeKind::Regular) {
    j["tree"] = "regular";
    j["delta"] = tree.branching();
  } else {
    j["tree"] = "gw_poisson";
    j["delta"] = tree.delta;
  }
  j["depth"] = tree.depth;
  return j;
}

TreeSpec tree_from_json(const json& j) {
  const std::string kind = j.at("tree").get<std::string>();
  const int depth = j.at("depth").get<int>();
  if (kind == "regular")
    return regular_tree(j.at("delta").get<int>(), depth);
  if (kind == "gw_poisson")
    return gw_poisson_tree(j.at("delta").get<double>(), depth);
  throw std::invalid_argument("unknown tree kind: " + kind);
}

json leaf_config_to_json(const LeafConfig& config) {
  json j;
  j["root"] = config.root_colour + 1;
  j["depth"] = config.tree.depth;
  j["offspring"] = config.tree.offspring_counts;
  json leaves = json::array();
  for (Colour c : config.leaf_colours) leaves.push_back(c + 1);
  j["leaves"] = std::move(leaves);
  return j;
}

LeafConfig leaf_config_from_json(const json& j) {
  LeafConfig config;
  config.tree.depth = j.at("depth").get<int>();
  if (config.tree.depth < 0)
    throw std::invalid_argument("leaf config: depth must be >= 0");
  config.tree.offspring_counts =
      j.at("offspring").get<std::vector<std::uint32_t>>();
  const int root = j.at("root").get<int>();
  if (root < 1) throw std::invalid_argument("leaf config: colours are 1-based");
  config.root_colour = static_cast<Colour>(root - 1);
  for (int leaf : j.at("leaves").get<std::vector<int>>()) {
    if (leaf < 1)
      throw std::invalid_argument("leaf config: colours are 1-based");
    config.leaf_colours.push_back(static_cast<Colour>(leaf - 1));
  }
  return config;
}

json belief_to_json(const Belief& belief) { return json(belief.probs); }

namespace {

json estimate_to_json(const Estimate& e) {
  return json{{"estimate", e.value}, {"se", e.se}};
}

}  // namespace

json report_to_json(const MomentReport& report) {
  json j;
  j["k"] = report.k;
  j["tree"] = tree_to_json(report.tree);
  j["n"] = report.depth();
  j["trials"] = report.trials;
  j["seed"] = report.seed;
  if (!std::isnan(report.x_n.value)) j["x_n"] = estimate_to_json(report.x_n);
  if (!std::isnan(report.z_n.value)) j["z_n"] = estimate_to_json(report.z_n);
  if (!std::isnan(report.p_n.value)) j["p_n"] = estimate_to_json(report.p_n);
  if (!std::isnan(report.tv.value)) j["tv"] = estimate_to_json(report.tv);
  return j;
}

json check_to_json(const IdentityCheck& check) {
  json j;
  j["name"] = check.name;
  j["measured"] = check.measured;
  j["predicted"] = check.predicted;
  j["sigma"] = check.sigma;
  j["verdict"] = !check.applicable ? "not-applicable"
                                   : (check.pass ? "pass" : "fail");
  if (!check.note.empty()) j["note"] = check.note;
  return j;
}

json yz_report_to_json(const YZMomentReport& report) {
  json j;
  j["k"] = report.k;
  j["delta"] = report.delta;
  j["n"] = report.n;
  j["trials"] = report.trials;
  j["seed"] = report.seed;
  j["x_n"] = estimate_to_json(report.x_n);
  j["z_n"] = estimate_to_json(report.z_n);
  json checks = json::array();
  for (const auto& c : report.checks()) checks.push_back(check_to_json(c));
  j["checks"] = std::move(checks);
  j["zsum_mean"] = estimate_to_json(report.zsum_mean);
  j["z1_var"] = report.z1_var;
  j["zsum_var"] = report.zsum_var;
  return j;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace recontree
