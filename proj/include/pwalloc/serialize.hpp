// JSON and DOT output for instances, graphs, assignments and schedules.

#pragma once

#include <string>

#include <json.hpp>
#include "pwalloc/allocation.hpp"
#include "pwalloc/validity.hpp"

namespace pwalloc {

using Json = nlohmann::json;

Json to_json(const NetworkInstance& instance);
/// Reads {n, c, sigma2, seed, positions, sink, gains}; gains are taken as
/// given. Throws std::invalid_argument on malformed input.
NetworkInstance instance_from_json(const Json& j);

/// {tails, heads, weights, kind}, one entry per edge in index order.
Json to_json(const MixedGraph& graph);

/// Edge list with endpoint coordinates for plotting. Starred tails carry
/// the head's coordinates and `starred_tail: true`.
Json witness_to_json(const std::vector<WitnessEdge>& witness, const NetworkInstance& instance);

Json to_json(const RateAssignment& a, const NetworkInstance& instance);
Json to_json(const PowerAssignment& a, const NetworkInstance& instance);
Json to_json(const DecodeSchedule& schedule);

/// Graphviz description of a witness, regular nodes pinned at their positions.
std::string witness_to_dot(const std::string& name, const std::vector<WitnessEdge>& witness,
                           const NetworkInstance& instance);

/// printf %.9g, the number format of every CSV column.
std::string format_number(double value);

}  // namespace pwalloc
