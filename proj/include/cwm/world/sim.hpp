#pragma once

#include <string>

#include "cwm/world/types.hpp"

namespace cwm::world {

struct StepResult {
  WorldState state;
  Feedback feedback;
};

/// Applies one action. Pure: the input state is untouched. The result
/// class is effective iff the successor differs structurally from the
/// input (tick aside); silent no-ops leave the state bit-identical and
/// report exactly "Nothing happens."; rejected actions report a message
/// starting with "You can't".
StepResult step(const WorldState& state, const Action& action);

/// Parses then steps. Unparseable text yields the input state unchanged
/// and a parse_error feedback.
StepResult step_text(const WorldState& state, const std::string& text);

/// Grounded actions attemptable at this state, classified by dry run and
/// sorted lexicographically by surface.
CandidateSet enumerate_candidates(const WorldState& state);

/// Deterministic text rendering of what the agent can see: current room,
/// visible objects (contents of closed holders are projected out), and
/// inventory. Injective over the states a logged gold trajectory visits:
/// within an episode, equal renderings imply structurally equal states.
std::string render_state(const WorldState& state);

/// True when the object can be acted on from the agent's position: in
/// inventory, in the agent's room, or inside an open holder chain that
/// bottoms out in either.
bool is_interactable(const WorldState& state, const std::string& id);

/// Room that transitively holds the object, or empty for inventory.
std::string root_room(const WorldState& state, const std::string& id);

}  // namespace cwm::world
