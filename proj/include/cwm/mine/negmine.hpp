#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cwm/world/episode.hpp"

namespace cwm::mine {

inline constexpr const char* kType1Silent = "type1_silent";
inline constexpr const char* kType2Rejected = "type2_rejected";
inline constexpr const char* kType3CrossTask = "type3_crosstask";
inline constexpr const char* kType4MinimalEdit = "type4_minimal_edit";

struct NegativeSample {
  std::string surface;
  std::string type;
  std::string source_family;  // cross-task negatives only
};

struct TrainingInstance {
  std::string family;
  int variation = 0;
  std::uint64_t seed = 0;
  int step_index = 0;
  std::string state_prompt;
  std::string gold_surface;
  std::vector<NegativeSample> negatives;
};

struct MiningConfig {
  int num_negatives = 16;
  int max_type1 = 4;  // silent
  int max_type2 = 6;  // rejected
  int max_type3 = 6;  // cross-task
  std::uint64_t seed = 7;
};

nlohmann::json mining_config_to_json(const MiningConfig& config);
MiningConfig mining_config_from_json(const nlohmann::json& j);

/// Mines typed environment negatives (types 1-3) for every step of every
/// episode. Pools are sampled without replacement under the per-type
/// caps; a short pool backfills from the others in type order rather
/// than padding or duplicating. Deterministic in (episodes, config).
std::vector<TrainingInstance> mine_env_negatives(
    const std::vector<world::EpisodeLog>& episodes, const MiningConfig& config);

/// Single-token antonym substitution on the gold surface, validated by a
/// dry run to be non-effective at the state. Grammatical (silent or
/// rejected) edits win over unparseable ones; ties break leftmost.
std::optional<NegativeSample> mine_minimal_edit(
    const world::WorldState& state, const std::string& gold_surface);

struct MiningStats {
  std::size_t instances = 0;
  std::size_t type1 = 0;
  std::size_t type2 = 0;
  std::size_t type3 = 0;
  std::size_t underfilled = 0;  // instances with fewer than num_negatives
};

MiningStats dataset_stats(const std::vector<TrainingInstance>& instances);
nlohmann::json mining_stats_to_json(const MiningStats& stats);

nlohmann::json training_instance_to_json(const TrainingInstance& instance);
TrainingInstance training_instance_from_json(const nlohmann::json& j);

void write_instances(const std::string& path,
                     const std::vector<TrainingInstance>& instances);
std::vector<TrainingInstance> read_instances(const std::string& path);

}  // namespace cwm::mine
