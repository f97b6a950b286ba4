#pragma once

#include <json.hpp>

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cwm/world/types.hpp"

namespace cwm::world {

// Physics constants shared by the stove/freezer process model and the
// explicit heat/cool verbs.
inline constexpr int kAmbientTemperature = 20;
inline constexpr int kHeatDelta = 25;
inline constexpr int kHeatCeiling = 250;
inline constexpr int kCoolDelta = 25;
inline constexpr int kCoolFloor = -40;

inline constexpr const char* kSilentMessage = "Nothing happens.";

/// Closed substance table. Lookup is by exact name.
const std::vector<Substance>& substance_table();
const Substance& substance(const std::string& name);
bool is_substance(const std::string& name);

/// Binary mixtures: an unordered pair of reagent substances -> product.
struct MixtureRule {
  std::string reagent_a;  // lexicographically smaller name
  std::string reagent_b;
  std::string product;
};
const std::vector<MixtureRule>& mixture_table();
std::optional<std::string> mixture_product(const std::string& a,
                                           const std::string& b);

/// Single-token antonym pairs used for minimal-edit negatives. Stored in
/// one direction; lookup covers both.
const std::vector<std::pair<std::string, std::string>>& antonym_table();
std::optional<std::string> antonym_of(const std::string& token);

/// Display-name synonym pools for portable objects, indexed by
/// variation id. Every pool has exactly five entries.
struct SynonymPool {
  std::string role;  // object id the pool applies to
  std::array<std::string, 5> names;
};
const std::vector<SynonymPool>& synonym_pools();
const std::string& pooled_name(const std::string& role, int variation);

/// Verb grammar: canonical verb key plus its surface template. Templates
/// use "<x>" and "<y>" as argument slots.
struct VerbRule {
  std::string key;
  std::string pattern;
  int arity = 0;
};
const std::vector<VerbRule>& verb_table();
const VerbRule& verb_rule(const std::string& key);

const std::vector<std::string>& growth_stage_names();

/// Everything above serialized as one canonical JSON document, so the
/// checked-in rules file and the compiled tables can be diffed in tests.
nlohmann::json rules_as_json();

}  // namespace cwm::world
