#pragma once

#include <json.hpp>
#include <string>

#include "recontree/bp.hpp"
#include "recontree/broadcast.hpp"
#include "recontree/estimators.hpp"
#include "recontree/model.hpp"

namespace recontree {

using json = nlohmann::ordered_json;

// Colours cross the JSON boundary 1-based; everything in memory is
// 0-based.

json channel_to_json(const Channel& channel);
Channel channel_from_json(const json& j);

json tree_to_json(const TreeSpec& tree);
TreeSpec tree_from_json(const json& j);

json leaf_config_to_json(const LeafConfig& config);
LeafConfig leaf_config_from_json(const json& j);

json belief_to_json(const Belief& belief);

json report_to_json(const MomentReport& report);
json check_to_json(const IdentityCheck& check);
json yz_report_to_json(const YZMomentReport& report);

/// Shortest round-trip-safe decimal rendering used by all CSV output.
std::string format_double(double v);

}  // namespace recontree
