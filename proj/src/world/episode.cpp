#include "cwm/world/episode.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "cwm/util/rng.hpp"
#include "cwm/version.hpp"
#include "cwm/world/grammar.hpp"
#include "cwm/world/rules.hpp"
#include "cwm/world/sim.hpp"

namespace cwm::world {

namespace {

constexpr int kMinGoldSteps = 8;
constexpr int kMaxGoldSteps = 40;
constexpr int kMinCandidates = 5;
constexpr int kMaxCandidates = 200;
constexpr std::size_t kMaxPromptChars = 2048;

struct WorldPlan {
  std::string target_substance;  // empty for grow-plant
  std::string reagent_substance;
  int goal_temp = 0;
  bool target_in_freezer = false;
};

WorldPlan family_plan(Family family, int variation) {
  WorldPlan plan;
  switch (family) {
    case Family::Boil: {
      static const char* targets[] = {"water", "salt water"};
      plan.target_substance = targets[variation % 2];
      break;
    }
    case Family::Melt: {
      static const char* targets[] = {"wax", "chocolate", "butter", "water"};
      plan.target_substance = targets[variation % 4];
      plan.target_in_freezer = plan.target_substance == "water";
      break;
    }
    case Family::GrowPlant:
      break;
    case Family::Thermometer: {
      static const char* targets[] = {"water", "salt water", "chocolate"};
      static const int goals[] = {70, 95, 45};
      plan.target_substance = targets[variation % 3];
      plan.goal_temp = goals[variation % 3];
      break;
    }
    case Family::ChemistryMix: {
      static const char* reagents[] = {"salt", "sugar", "soap"};
      plan.reagent_substance = reagents[variation % 3];
      break;
    }
    case Family::MeasureMeltingPoint: {
      static const char* targets[] = {"wax", "chocolate", "butter", "soap"};
      plan.target_substance = targets[variation % 4];
      break;
    }
  }
  return plan;
}

WorldObject make_fixture(std::string id, std::string name, std::string room) {
  WorldObject o;
  o.id = std::move(id);
  o.name = std::move(name);
  o.kind = ObjectKind::Fixture;
  o.location = std::move(room);
  return o;
}

WorldObject make_portion(std::string id, const std::string& substance_name,
                         std::string location, int temperature) {
  WorldObject o;
  o.id = std::move(id);
  o.name = substance_name;
  o.kind = ObjectKind::SubstancePortion;
  o.substance = substance_name;
  o.location = std::move(location);
  o.temperature = temperature;
  o.portable = true;
  return o;
}

void check_world(const WorldState& state) {
  std::set<std::string> ids;
  std::set<std::string> names;
  for (const WorldObject& obj : state.objects) {
    if (!ids.insert(obj.id).second) {
      throw std::logic_error("duplicate object id: " + obj.id);
    }
    if (!names.insert(obj.name).second) {
      throw std::logic_error("duplicate display name: " + obj.name);
    }
    if (obj.is_holder && obj.is_surface) {
      throw std::logic_error("object is both holder and surface: " + obj.id);
    }
  }
}

WorldState build_world(Family family, int variation, std::uint64_t seed) {
  const WorldPlan plan = family_plan(family, variation);
  util::Rng rng(util::derive_seed(seed, "world"));
  auto jitter_temp = [&rng](int base) {
    return base + static_cast<int>(rng.below(7)) - 3;
  };
  const bool uses_stove = !plan.target_substance.empty();
  const bool grows = family == Family::GrowPlant;
  const bool mixes = family == Family::ChemistryMix;

  WorldState state;
  state.rooms = {"kitchen", "greenhouse", "workshop"};
  state.agent_room = state.rooms[rng.below(state.rooms.size())];

  // Fixed furniture.
  WorldObject stove = make_fixture("stove", "stove", "kitchen");
  stove.kind = ObjectKind::Device;
  stove.has_switch = true;
  stove.heats_contents = true;
  stove.is_surface = true;
  state.objects.push_back(stove);

  if (plan.target_in_freezer) {
    WorldObject freezer = make_fixture("freezer", "freezer", "kitchen");
    freezer.kind = ObjectKind::Device;
    freezer.has_switch = true;
    freezer.device_active = true;
    freezer.cools_contents = true;
    freezer.is_holder = true;
    freezer.openable = true;
    freezer.open = false;
    freezer.word_active = "running";
    freezer.word_inactive = "stopped";
    freezer.word_open = "ajar";
    freezer.word_closed = "shut";
    state.objects.push_back(freezer);
  }

  WorldObject counter = make_fixture("counter", "counter", "kitchen");
  counter.is_surface = true;
  state.objects.push_back(counter);

  if (grows) {
    WorldObject flower_pot = make_fixture("flower_pot", "planter", "greenhouse");
    flower_pot.kind = ObjectKind::Container;
    flower_pot.is_holder = true;
    flower_pot.soil = true;
    state.objects.push_back(flower_pot);
  }

  WorldObject shelf = make_fixture("shelf", "shelf", "greenhouse");
  shelf.is_surface = true;
  state.objects.push_back(shelf);

  WorldObject crate = make_fixture("crate", "crate", "workshop");
  crate.kind = ObjectKind::Container;
  crate.is_holder = true;
  crate.openable = true;
  crate.open = false;
  crate.word_open = "unlatched";
  crate.word_closed = "latched";
  state.objects.push_back(crate);

  WorldObject workbench = make_fixture("workbench", "workbench", "workshop");
  workbench.is_surface = true;
  state.objects.push_back(workbench);

  // Portable equipment appears only in families whose plans need it, so
  // each family's worlds carry a distinct object signature. Display names
  // rotate with the variation id and starting spots are drawn per seed so
  // regenerated worlds differ.
  if (uses_stove || mixes) {
    static const char* main_spots[] = {"counter", "stove"};
    WorldObject vessel_main =
        make_fixture("vessel_main", pooled_name("vessel_main", variation),
                     main_spots[rng.below(2)]);
    vessel_main.kind = ObjectKind::Container;
    vessel_main.is_holder = true;
    vessel_main.portable = true;
    state.objects.push_back(vessel_main);
  }

  if (grows || mixes) {
    static const char* jug_spots[] = {"shelf", "crate"};
    WorldObject jug = make_fixture("jug", pooled_name("jug", variation),
                                   jug_spots[rng.below(2)]);
    jug.kind = ObjectKind::Container;
    jug.is_holder = true;
    jug.is_waterer = true;
    jug.portable = true;
    state.objects.push_back(jug);
    state.objects.push_back(make_portion(
        "portion_water", "water", "jug", jitter_temp(kAmbientTemperature)));
  }

  static const char* therm_spots[] = {"workbench", "counter", "shelf"};
  WorldObject therm =
      make_fixture("thermometer", "thermometer", therm_spots[rng.below(3)]);
  therm.kind = ObjectKind::Instrument;
  therm.is_thermometer = true;
  therm.portable = true;
  state.objects.push_back(therm);

  if (grows) {
    static const char* seed_spots[] = {"crate", "shelf"};
    WorldObject seed_obj = make_fixture(
        "seed", pooled_name("seed", variation), seed_spots[rng.below(2)]);
    seed_obj.kind = ObjectKind::Plant;
    seed_obj.portable = true;
    state.objects.push_back(seed_obj);
  }

  // Portions.
  if (uses_stove) {
    static const char* target_spots[] = {"counter", "crate", "shelf"};
    std::string spot = target_spots[rng.below(3)];
    int temp = jitter_temp(kAmbientTemperature);
    if (plan.target_in_freezer) {
      spot = "freezer";
      temp = jitter_temp(-35);
    }
    state.objects.push_back(
        make_portion("portion_target", plan.target_substance, spot, temp));
  }
  if (!plan.reagent_substance.empty()) {
    static const char* reagent_spots[] = {"counter", "crate"};
    state.objects.push_back(make_portion(
        "portion_reagent", plan.reagent_substance,
        reagent_spots[rng.below(2)], jitter_temp(kAmbientTemperature)));
  }

  std::vector<std::string> extras;
  for (const char* cand : {"chocolate", "sugar", "butter"}) {
    if (cand != plan.target_substance && cand != plan.reagent_substance) {
      extras.push_back(cand);
    }
  }
  const std::string extra = extras[rng.below(extras.size())];
  static const char* extra_spots[] = {"shelf", "workbench", "crate"};
  state.objects.push_back(make_portion("portion_extra", extra,
                                       extra_spots[rng.below(3)],
                                       jitter_temp(kAmbientTemperature)));

  std::sort(state.objects.begin(), state.objects.end(),
            [](const WorldObject& a, const WorldObject& b) {
              return a.id < b.id;
            });
  check_world(state);
  return state;
}

/// Executes actions while recording them; every planned action must be
/// effective, which keeps planners honest.
class Planner {
 public:
  explicit Planner(WorldState state) : state_(std::move(state)) {}

  const WorldState& state() const { return state_; }
  std::vector<Action> take() { return std::move(actions_); }

  void act(const std::string& verb, const std::vector<std::string>& args) {
    Action action = make_action(state_, verb, args);
    StepResult result = step(state_, action);
    if (result.feedback.cls != FeedbackClass::Effective) {
      throw std::logic_error("gold planner produced a non-effective step: " +
                             action.surface + " -> " + result.feedback.message);
    }
    state_ = std::move(result.state);
    actions_.push_back(std::move(action));
  }

  void ensure_room(const std::string& room) {
    if (state_.agent_room != room) act("go_to", {room});
  }

  /// Moves the agent to the object, opens what blocks it, picks it up,
  /// and closes again whatever it opened.
  void fetch(const std::string& id) {
    const WorldObject* obj = state_.find(id);
    if (obj == nullptr) throw std::logic_error("fetch: unknown id " + id);
    if (obj->location == kInventoryLocation) return;
    ensure_room(root_room(state_, id));
    std::vector<std::string> opened;
    const WorldObject* cur = obj;
    while (const WorldObject* holder = state_.find(cur->location)) {
      if (holder->openable && !holder->open) {
        opened.push_back(holder->id);
      }
      cur = holder;
    }
    for (auto it = opened.rbegin(); it != opened.rend(); ++it) {
      act("open", {*it});
    }
    act("pick_up", {id});
    for (const std::string& holder_id : opened) {
      act("close", {holder_id});
    }
  }

  /// Ensures the main vessel sits on the stove, then moves the target
  /// portion into it with the thermometer in hand for later readings.
  void setup_stove(const Episode& ep) {
    fetch("thermometer");
    const WorldObject* vessel = state_.find("vessel_main");
    if (vessel->location != "stove") {
      fetch("vessel_main");
      ensure_room("kitchen");
      act("put_on", {"vessel_main", "stove"});
    }
    fetch(ep.goal.target_id);
    ensure_room("kitchen");
    act("put_in", {ep.goal.target_id, "vessel_main"});
  }

  void measure(const std::string& portion_id) {
    const WorldObject* therm = state_.find("thermometer");
    const WorldObject* portion = state_.find(portion_id);
    if (therm->reading != portion->temperature) {
      act("use_on", {"thermometer", portion_id});
    }
  }

  void heat_until(const Episode& ep, auto done) {
    act("activate", {"stove"});
    int heats = 0;
    while (!done(*state_.find(ep.goal.target_id))) {
      act("heat", {ep.goal.target_id});
      heats += 1;
      if (heats == 2) measure(ep.goal.target_id);
      if (heats > 16) throw std::logic_error("heating did not converge");
    }
  }

 private:
  WorldState state_;
  std::vector<Action> actions_;
};

Phase portion_phase(const WorldObject& obj) {
  return phase_of(substance(obj.substance), obj.temperature);
}

std::vector<Action> plan_gold(Episode& ep) {
  Planner plan(ep.initial_state);
  switch (ep.family) {
    case Family::Boil: {
      plan.setup_stove(ep);
      plan.measure(ep.goal.target_id);
      plan.heat_until(ep, [](const WorldObject& t) {
        return portion_phase(t) == Phase::Gas;
      });
      plan.measure(ep.goal.target_id);
      plan.act("deactivate", {"stove"});
      plan.act("put_down", {"thermometer"});
      break;
    }
    case Family::Melt: {
      plan.setup_stove(ep);
      plan.measure(ep.goal.target_id);
      plan.heat_until(ep, [](const WorldObject& t) {
        return portion_phase(t) != Phase::Solid;
      });
      plan.measure(ep.goal.target_id);
      plan.act("deactivate", {"stove"});
      plan.act("put_down", {"thermometer"});
      break;
    }
    case Family::GrowPlant: {
      plan.fetch("thermometer");
      plan.fetch("seed");
      plan.ensure_room("greenhouse");
      plan.act("plant_in", {"seed", "flower_pot"});
      plan.fetch("jug");
      plan.ensure_room("greenhouse");
      for (int i = 0; i < kFinalGrowthStage; ++i) {
        plan.act("water", {"seed"});
      }
      plan.act("put_down", {"jug"});
      plan.measure("portion_water");
      plan.act("put_down", {"thermometer"});
      break;
    }
    case Family::Thermometer: {
      plan.setup_stove(ep);
      plan.measure(ep.goal.target_id);
      const int goal_temp = ep.goal.target_temp;
      plan.heat_until(ep, [goal_temp](const WorldObject& t) {
        return t.temperature >= goal_temp;
      });
      plan.measure(ep.goal.target_id);
      plan.act("deactivate", {"stove"});
      break;
    }
    case Family::ChemistryMix: {
      plan.fetch("thermometer");
      plan.fetch("portion_water");
      plan.ensure_room("kitchen");
      plan.act("put_in", {"portion_water", "vessel_main"});
      plan.fetch("portion_reagent");
      plan.ensure_room("kitchen");
      plan.act("put_in", {"portion_reagent", "vessel_main"});
      plan.act("mix", {"vessel_main"});
      std::string product_id;
      for (const WorldObject& obj : plan.state().objects) {
        if (obj.substance == ep.goal.product) product_id = obj.id;
      }
      if (product_id.empty()) throw std::logic_error("mix produced nothing");
      plan.measure(product_id);
      plan.act("put_down", {"thermometer"});
      break;
    }
    case Family::MeasureMeltingPoint: {
      plan.setup_stove(ep);
      plan.measure(ep.goal.target_id);
      plan.act("activate", {"stove"});
      while (portion_phase(*plan.state().find(ep.goal.target_id)) ==
             Phase::Solid) {
        plan.act("heat", {ep.goal.target_id});
        plan.measure(ep.goal.target_id);
      }
      plan.act("deactivate", {"stove"});
      plan.act("put_down", {"thermometer"});
      break;
    }
  }
  WorldState final_state = plan.state();
  if (!goal_reached(ep, final_state)) {
    throw std::logic_error("gold trajectory does not reach the goal");
  }
  std::vector<Action> gold = plan.take();
  if (static_cast<int>(gold.size()) < kMinGoldSteps ||
      static_cast<int>(gold.size()) > kMaxGoldSteps) {
    throw std::logic_error("gold trajectory length out of range: " +
                           std::to_string(gold.size()));
  }
  return gold;
}

}  // namespace

const std::vector<Family>& all_families() {
  static const std::vector<Family> families = {
      Family::GrowPlant,    Family::Boil,
      Family::Melt,         Family::Thermometer,
      Family::ChemistryMix, Family::MeasureMeltingPoint,
  };
  return families;
}

const char* to_string(Family family) {
  switch (family) {
    case Family::GrowPlant: return "grow-plant";
    case Family::Boil: return "boil";
    case Family::Melt: return "melt";
    case Family::Thermometer: return "thermometer";
    case Family::ChemistryMix: return "chemistry-mix";
    case Family::MeasureMeltingPoint: return "measure-melting-point";
  }
  throw std::logic_error("unknown family");
}

Family family_from_string(const std::string& name) {
  for (Family family : all_families()) {
    if (name == to_string(family)) return family;
  }
  throw std::invalid_argument("unknown task family: " + name);
}

bool family_in_domain(Family family) {
  return family == Family::GrowPlant || family == Family::Boil ||
         family == Family::Melt;
}

bool goal_reached(const Episode& ep, const WorldState& state) {
  switch (ep.family) {
    case Family::Boil: {
      const WorldObject* t = state.find(ep.goal.target_id);
      return t != nullptr && portion_phase(*t) == Phase::Gas;
    }
    case Family::Melt: {
      const WorldObject* t = state.find(ep.goal.target_id);
      return t != nullptr && portion_phase(*t) == Phase::Liquid;
    }
    case Family::GrowPlant: {
      const WorldObject* plant = state.find(ep.goal.target_id);
      return plant != nullptr && plant->growth_stage == kFinalGrowthStage;
    }
    case Family::Thermometer: {
      const WorldObject* t = state.find(ep.goal.target_id);
      const WorldObject* therm = state.find("thermometer");
      return t != nullptr && therm != nullptr &&
             therm->reading == t->temperature &&
             t->temperature >= ep.goal.target_temp;
    }
    case Family::ChemistryMix: {
      return std::any_of(state.objects.begin(), state.objects.end(),
                         [&](const WorldObject& o) {
                           return o.substance == ep.goal.product;
                         });
    }
    case Family::MeasureMeltingPoint: {
      const WorldObject* t = state.find(ep.goal.target_id);
      const WorldObject* therm = state.find("thermometer");
      if (t == nullptr || therm == nullptr) return false;
      const Substance& s = substance(t->substance);
      return portion_phase(*t) == Phase::Liquid &&
             therm->reading == t->temperature &&
             t->temperature >= s.melting_point &&
             t->temperature < s.melting_point + kHeatDelta;
    }
  }
  return false;
}

Episode init_episode(Family family, int variation, std::uint64_t seed) {
  if (variation < 0 || variation > 9) {
    throw std::invalid_argument("variation must be in 0..9");
  }
  Episode ep;
  ep.family = family;
  ep.variation = variation;
  ep.seed = seed;
  ep.initial_state = build_world(family, variation, seed);

  const WorldPlan plan = family_plan(family, variation);
  ep.goal.target_temp = plan.goal_temp;
  if (family == Family::GrowPlant) {
    ep.goal.target_id = "seed";
  } else if (family == Family::ChemistryMix) {
    ep.goal.product = *mixture_product("water", plan.reagent_substance);
  } else {
    ep.goal.target_id = "portion_target";
  }

  ep.gold = plan_gold(ep);
  return ep;
}

EpisodeLog run_episode(const Episode& ep) {
  EpisodeLog log;
  log.family = to_string(ep.family);
  log.variation = ep.variation;
  log.seed = ep.seed;

  WorldState state = ep.initial_state;
  for (const Action& gold : ep.gold) {
    StepRecord record;
    record.state_prompt = render_state(state);
    if (record.state_prompt.size() > kMaxPromptChars) {
      throw std::logic_error("state prompt exceeds length bound");
    }
    record.candidates = enumerate_candidates(state);
    const int n = static_cast<int>(record.candidates.size());
    if (n < kMinCandidates || n > kMaxCandidates) {
      throw std::logic_error("candidate count out of range: " +
                             std::to_string(n));
    }
    const bool gold_present = std::any_of(
        record.candidates.begin(), record.candidates.end(),
        [&](const Candidate& c) {
          return c.action.surface == gold.surface &&
                 c.cls == FeedbackClass::Effective;
        });
    if (!gold_present) {
      throw std::logic_error("gold action missing from candidate set: " +
                             gold.surface);
    }
    record.gold_surface = gold.surface;
    log.steps.push_back(std::move(record));

    StepResult result = step(state, gold);
    if (result.feedback.cls != FeedbackClass::Effective) {
      throw std::logic_error("gold step not effective on replay: " +
                             gold.surface);
    }
    state = std::move(result.state);
  }
  if (!goal_reached(ep, state)) {
    throw std::logic_error("goal not reached on replay");
  }
  return log;
}

nlohmann::json episode_log_to_json(const EpisodeLog& log) {
  nlohmann::json steps = nlohmann::json::array();
  for (const StepRecord& record : log.steps) {
    nlohmann::json cands = nlohmann::json::array();
    for (const Candidate& c : record.candidates) {
      cands.push_back({{"surface", c.action.surface},
                       {"class", to_string(c.cls)}});
    }
    steps.push_back({{"state_prompt", record.state_prompt},
                     {"candidates", std::move(cands)},
                     {"gold_surface", record.gold_surface}});
  }
  return nlohmann::json{{"schema_version", kSchemaVersion},
                        {"family", log.family},
                        {"variation", log.variation},
                        {"seed", log.seed},
                        {"steps", std::move(steps)}};
}

EpisodeLog episode_log_from_json(const nlohmann::json& j) {
  if (j.at("schema_version").get<int>() != kSchemaVersion) {
    throw std::runtime_error("episode schema version mismatch");
  }
  EpisodeLog log;
  log.family = j.at("family").get<std::string>();
  log.variation = j.at("variation").get<int>();
  log.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& js : j.at("steps")) {
    StepRecord record;
    record.state_prompt = js.at("state_prompt").get<std::string>();
    record.gold_surface = js.at("gold_surface").get<std::string>();
    for (const auto& jc : js.at("candidates")) {
      Candidate c;
      c.action.surface = jc.at("surface").get<std::string>();
      c.cls = feedback_class_from_string(jc.at("class").get<std::string>());
      record.candidates.push_back(std::move(c));
    }
    log.steps.push_back(std::move(record));
  }
  return log;
}

}  // namespace cwm::world
