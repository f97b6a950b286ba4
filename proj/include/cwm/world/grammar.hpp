#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cwm/world/types.hpp"

namespace cwm::world {

/// Builds the canonical surface form for a verb applied to object ids
/// (room names for "go_to"). Throws on unknown verbs, wrong arity, or
/// unknown ids.
Action make_action(const WorldState& state, const std::string& verb_key,
                   const std::vector<std::string>& args);

/// Parses a surface string against the verb grammar and the display
/// names present in the world. Returns nullopt if no rule matches or a
/// slot does not resolve to a known object/room.
std::optional<Action> parse_action(const WorldState& state,
                                   const std::string& text);

}  // namespace cwm::world
