#pragma once

#include <optional>
#include <string>
#include <vector>

namespace cwm::world {

enum class ObjectKind {
  SubstancePortion,
  Container,
  Device,
  Fixture,
  Plant,
  Instrument,
};

enum class Phase { Solid, Liquid, Gas };

enum class FeedbackClass { Effective, Silent, Rejected, ParseError };

const char* to_string(ObjectKind kind);
const char* to_string(Phase phase);
const char* to_string(FeedbackClass cls);
FeedbackClass feedback_class_from_string(const std::string& name);

struct Substance {
  std::string name;
  int melting_point;  // degrees C
  int boiling_point;
  bool edible;
};

inline constexpr int kNoReading = -9999;
inline constexpr int kUnplanted = -1;
inline constexpr int kFinalGrowthStage = 4;  // planted .. flowering

/// Object locations are either a room name or the id of a holder object.
/// Inventory is the distinguished location "@inventory".
inline constexpr const char* kInventoryLocation = "@inventory";

struct WorldObject {
  std::string id;    // stable identifier, never rendered
  std::string name;  // display name, unique within a world
  ObjectKind kind = ObjectKind::Fixture;
  std::string location;
  int temperature = 20;

  // substance-portion
  std::string substance;

  // device
  bool has_switch = false;
  bool device_active = false;
  bool heats_contents = false;  // stove-like, acts on objects placed on it
  bool cools_contents = false;  // freezer-like, acts on objects placed in it

  // Status words used by the renderer. Each stateful object carries its
  // own natural pair (the freezer hums, the crate latches) so that any
  // two world states differ in the rendered words themselves, not just
  // in which object a shared word sits next to.
  std::string word_active = "on";
  std::string word_inactive = "off";
  std::string word_open = "open";
  std::string word_closed = "closed";

  // containment
  bool is_holder = false;   // objects can be put IN it
  bool is_surface = false;  // objects can be put ON it
  bool openable = false;
  bool open = true;  // doorless holders are permanently open
  bool soil = false;
  bool is_waterer = false;  // counts as a watering vessel

  bool portable = false;

  // plant
  int growth_stage = kUnplanted;

  // instrument
  bool is_thermometer = false;
  int reading = kNoReading;

  bool operator==(const WorldObject&) const = default;
};

struct WorldState {
  std::vector<std::string> rooms;    // fixed order, fixed at build time
  std::vector<WorldObject> objects;  // kept sorted by id
  std::string agent_room;
  int tick = 0;  // count of state-changing steps; excluded from equality

  const WorldObject* find(const std::string& id) const;
  WorldObject* find(const std::string& id);
  const WorldObject* find_by_name(const std::string& name) const;

  std::vector<std::string> inventory_ids() const;

  /// Structural equality over everything an action can change. The tick
  /// counter is bookkeeping and deliberately excluded so that feedback
  /// classification and render injectivity agree.
  bool structurally_equal(const WorldState& other) const;
};

struct Action {
  std::string verb;               // canonical verb key, e.g. "pick_up"
  std::vector<std::string> args;  // object ids or room names
  std::string surface;            // canonical lowercase text form

  bool operator==(const Action& other) const {
    return surface == other.surface;
  }
};

struct Feedback {
  FeedbackClass cls = FeedbackClass::Silent;
  std::string message;
};

struct Candidate {
  Action action;
  FeedbackClass cls = FeedbackClass::Silent;
};

/// All attemptable actions at a state, ordered lexicographically by
/// surface text, each pre-classified by a dry run.
using CandidateSet = std::vector<Candidate>;

/// Phase of a portion under the substance rule table:
/// solid iff T < melting point, gas iff T >= boiling point, else liquid.
Phase phase_of(const Substance& substance, int temperature);

}  // namespace cwm::world
