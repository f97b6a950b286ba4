#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "cwm/world/types.hpp"

namespace cwm::world {

enum class Family {
  GrowPlant,
  Boil,
  Melt,
  Thermometer,
  ChemistryMix,
  MeasureMeltingPoint,
};

const std::vector<Family>& all_families();
const char* to_string(Family family);
Family family_from_string(const std::string& name);

/// The first three families form the in-domain set; the last three are
/// reserved for out-of-distribution evaluation.
bool family_in_domain(Family family);

struct EpisodeGoal {
  std::string target_id;  // portion or plant the goal inspects
  int target_temp = 0;    // thermometer family only
  std::string product;    // chemistry family only
};

struct Episode {
  Family family = Family::Boil;
  int variation = 0;
  std::uint64_t seed = 0;
  WorldState initial_state;
  std::vector<Action> gold;
  EpisodeGoal goal;
};

/// Builds the world for (family, variation, seed), plans the gold
/// trajectory by actually executing it, and verifies the goal holds at
/// the end. Identical arguments always yield an identical episode.
Episode init_episode(Family family, int variation, std::uint64_t seed);

bool goal_reached(const Episode& episode, const WorldState& state);

struct StepRecord {
  std::string state_prompt;
  CandidateSet candidates;
  std::string gold_surface;
};

struct EpisodeLog {
  std::string family;
  int variation = 0;
  std::uint64_t seed = 0;
  std::vector<StepRecord> steps;
};

/// Replays the gold trajectory, rendering and enumerating candidates at
/// every pre-action state. Throws if a gold action is not effective, the
/// goal does not hold at the end, or a candidate-set invariant breaks.
EpisodeLog run_episode(const Episode& episode);

nlohmann::json episode_log_to_json(const EpisodeLog& log);
EpisodeLog episode_log_from_json(const nlohmann::json& j);

}  // namespace cwm::world
