#include "cwm/world/rules.hpp"

#include <algorithm>
#include <stdexcept>

namespace cwm::world {

const char* to_string(ObjectKind kind) {
  switch (kind) {
    case ObjectKind::SubstancePortion: return "substance_portion";
    case ObjectKind::Container: return "container";
    case ObjectKind::Device: return "device";
    case ObjectKind::Fixture: return "fixture";
    case ObjectKind::Plant: return "plant";
    case ObjectKind::Instrument: return "instrument";
  }
  throw std::logic_error("unknown object kind");
}

const char* to_string(Phase phase) {
  switch (phase) {
    case Phase::Solid: return "solid";
    case Phase::Liquid: return "liquid";
    case Phase::Gas: return "gas";
  }
  throw std::logic_error("unknown phase");
}

const char* to_string(FeedbackClass cls) {
  switch (cls) {
    case FeedbackClass::Effective: return "effective";
    case FeedbackClass::Silent: return "silent";
    case FeedbackClass::Rejected: return "rejected";
    case FeedbackClass::ParseError: return "parse_error";
  }
  throw std::logic_error("unknown feedback class");
}

FeedbackClass feedback_class_from_string(const std::string& name) {
  if (name == "effective") return FeedbackClass::Effective;
  if (name == "silent") return FeedbackClass::Silent;
  if (name == "rejected") return FeedbackClass::Rejected;
  if (name == "parse_error") return FeedbackClass::ParseError;
  throw std::invalid_argument("unknown feedback class: " + name);
}

Phase phase_of(const Substance& s, int temperature) {
  if (temperature < s.melting_point) return Phase::Solid;
  if (temperature >= s.boiling_point) return Phase::Gas;
  return Phase::Liquid;
}

const std::vector<Substance>& substance_table() {
  static const std::vector<Substance> table = {
      {"butter", 35, 170, true},
      {"chocolate", 30, 200, true},
      {"iron", 1538, 2862, false},
      {"salt", 801, 1465, true},
      {"salt water", -2, 102, true},
      {"soap", 49, 250, false},
      {"soapy water", -3, 104, false},
      {"sugar", 186, 350, true},
      {"sugar water", -1, 103, true},
      {"water", 0, 100, true},
      {"wax", 55, 300, false},
  };
  return table;
}

const Substance& substance(const std::string& name) {
  for (const auto& s : substance_table()) {
    if (s.name == name) return s;
  }
  throw std::invalid_argument("unknown substance: " + name);
}

bool is_substance(const std::string& name) {
  const auto& table = substance_table();
  return std::any_of(table.begin(), table.end(),
                     [&](const Substance& s) { return s.name == name; });
}

const std::vector<MixtureRule>& mixture_table() {
  static const std::vector<MixtureRule> table = {
      {"salt", "water", "salt water"},
      {"soap", "water", "soapy water"},
      {"sugar", "water", "sugar water"},
  };
  return table;
}

std::optional<std::string> mixture_product(const std::string& a,
                                           const std::string& b) {
  const std::string& lo = std::min(a, b);
  const std::string& hi = std::max(a, b);
  for (const auto& rule : mixture_table()) {
    if (rule.reagent_a == lo && rule.reagent_b == hi) return rule.product;
  }
  return std::nullopt;
}

const std::vector<std::pair<std::string, std::string>>& antonym_table() {
  static const std::vector<std::pair<std::string, std::string>> table = {
      {"heat", "cool"},
      {"open", "close"},
      {"activate", "deactivate"},
      {"melt", "freeze"},
      {"hot", "cold"},
      {"increase", "decrease"},
      {"in", "out"},
  };
  return table;
}

std::optional<std::string> antonym_of(const std::string& token) {
  for (const auto& [a, b] : antonym_table()) {
    if (token == a) return b;
    if (token == b) return a;
  }
  return std::nullopt;
}

const std::vector<SynonymPool>& synonym_pools() {
  static const std::vector<SynonymPool> pools = {
      {"vessel_main", {"pot", "pan", "kettle", "saucepan", "beaker"}},
      {"vessel_aux", {"jar", "bowl", "flask", "mug", "basin"}},
      {"jug", {"jug", "pitcher", "carafe", "flagon", "canteen"}},
      {"seed", {"bean", "pea", "corn", "rose", "fern"}},
  };
  return pools;
}

const std::string& pooled_name(const std::string& role, int variation) {
  for (const auto& pool : synonym_pools()) {
    if (pool.role == role) {
      return pool.names[static_cast<std::size_t>(variation % 5)];
    }
  }
  throw std::invalid_argument("no synonym pool for role: " + role);
}

const std::vector<VerbRule>& verb_table() {
  static const std::vector<VerbRule> table = {
      {"wait", "wait", 0},
      {"look_around", "look around", 0},
      {"go_to", "go to the <x>", 1},
      {"pick_up", "pick up the <x>", 1},
      {"put_down", "put down the <x>", 1},
      {"open", "open the <x>", 1},
      {"close", "close the <x>", 1},
      {"activate", "activate the <x>", 1},
      {"deactivate", "deactivate the <x>", 1},
      {"eat", "eat the <x>", 1},
      {"push", "push the <x>", 1},
      {"water", "water the <x>", 1},
      {"heat", "heat the <x>", 1},
      {"cool", "cool the <x>", 1},
      {"mix", "mix the <x>", 1},
      {"use_on", "use the <x> on the <y>", 2},
      {"put_in", "put the <x> in the <y>", 2},
      {"put_on", "put the <x> on the <y>", 2},
      {"plant_in", "plant the <x> in the <y>", 2},
  };
  return table;
}

const VerbRule& verb_rule(const std::string& key) {
  for (const auto& rule : verb_table()) {
    if (rule.key == key) return rule;
  }
  throw std::invalid_argument("unknown verb: " + key);
}

const std::vector<std::string>& growth_stage_names() {
  static const std::vector<std::string> names = {
      "planted", "sprout", "seedling", "budding", "flowering"};
  return names;
}

nlohmann::json rules_as_json() {
  nlohmann::json j;
  j["physics"] = {
      {"ambient_temperature", kAmbientTemperature},
      {"heat_delta", kHeatDelta},
      {"heat_ceiling", kHeatCeiling},
      {"cool_delta", kCoolDelta},
      {"cool_floor", kCoolFloor},
  };
  j["substances"] = nlohmann::json::array();
  for (const auto& s : substance_table()) {
    j["substances"].push_back({{"name", s.name},
                               {"melting_point", s.melting_point},
                               {"boiling_point", s.boiling_point},
                               {"edible", s.edible}});
  }
  j["mixtures"] = nlohmann::json::array();
  for (const auto& m : mixture_table()) {
    j["mixtures"].push_back({{"reagent_a", m.reagent_a},
                             {"reagent_b", m.reagent_b},
                             {"product", m.product}});
  }
  j["antonyms"] = nlohmann::json::array();
  for (const auto& [a, b] : antonym_table()) {
    j["antonyms"].push_back({{"a", a}, {"b", b}});
  }
  j["synonym_pools"] = nlohmann::json::array();
  for (const auto& pool : synonym_pools()) {
    nlohmann::json names = nlohmann::json::array();
    for (const auto& n : pool.names) names.push_back(n);
    j["synonym_pools"].push_back({{"role", pool.role}, {"names", names}});
  }
  j["verbs"] = nlohmann::json::array();
  for (const auto& v : verb_table()) {
    j["verbs"].push_back(
        {{"key", v.key}, {"pattern", v.pattern}, {"arity", v.arity}});
  }
  j["growth_stages"] = growth_stage_names();
  return j;
}

}  // namespace cwm::world
