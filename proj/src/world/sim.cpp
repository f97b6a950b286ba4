#include "cwm/world/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cwm/util/text.hpp"
#include "cwm/world/grammar.hpp"
#include "cwm/world/rules.hpp"

namespace cwm::world {

namespace {

constexpr int kMaxHolderDepth = 8;

bool is_room_name(const WorldState& state, const std::string& loc) {
  return std::find(state.rooms.begin(), state.rooms.end(), loc) !=
         state.rooms.end();
}

/// Walks the holder chain upward. Returns the containing room, or empty
/// for inventory.
std::string walk_to_room(const WorldState& state, const WorldObject& obj) {
  const WorldObject* cur = &obj;
  for (int depth = 0; depth < kMaxHolderDepth; ++depth) {
    if (cur->location == kInventoryLocation) return "";
    if (is_room_name(state, cur->location)) return cur->location;
    const WorldObject* holder = state.find(cur->location);
    if (holder == nullptr) throw std::logic_error("dangling location");
    cur = holder;
  }
  throw std::logic_error("holder chain too deep");
}

/// True when some ancestor holder is an active device with the given
/// process capability (stove heats what sits on it, and transitively the
/// contents; the freezer cools what sits in it).
bool in_process_chain(const WorldState& state, const WorldObject& obj,
                      bool heating) {
  const WorldObject* cur = &obj;
  for (int depth = 0; depth < kMaxHolderDepth; ++depth) {
    if (cur->location == kInventoryLocation ||
        is_room_name(state, cur->location)) {
      return false;
    }
    const WorldObject* holder = state.find(cur->location);
    if (holder == nullptr) throw std::logic_error("dangling location");
    if (holder->device_active &&
        (heating ? holder->heats_contents : holder->cools_contents)) {
      return true;
    }
    cur = holder;
  }
  return false;
}

bool ancestor_of(const WorldState& state, const std::string& maybe_ancestor,
                 const WorldObject& obj) {
  const WorldObject* cur = &obj;
  for (int depth = 0; depth < kMaxHolderDepth; ++depth) {
    if (cur->location == kInventoryLocation ||
        is_room_name(state, cur->location)) {
      return false;
    }
    if (cur->location == maybe_ancestor) return true;
    cur = state.find(cur->location);
    if (cur == nullptr) throw std::logic_error("dangling location");
  }
  return false;
}

StepResult rejected(const WorldState& state, std::string message) {
  return {state, {FeedbackClass::Rejected, std::move(message)}};
}

StepResult silent(const WorldState& state) {
  return {state, {FeedbackClass::Silent, kSilentMessage}};
}

StepResult effective(WorldState next, std::string message) {
  next.tick += 1;
  return {std::move(next), {FeedbackClass::Effective, std::move(message)}};
}

StepResult cant_reach(const WorldState& state, const WorldObject& obj) {
  return rejected(state, "You can't reach the " + obj.name + ".");
}

int clamp_heat(int t) { return std::min(t + kHeatDelta, kHeatCeiling); }
int clamp_cool(int t) { return std::max(t - kCoolDelta, kCoolFloor); }

StepResult do_wait(const WorldState& state) {
  WorldState next = state;
  bool changed = false;
  for (WorldObject& obj : next.objects) {
    if (obj.kind != ObjectKind::SubstancePortion) continue;
    if (in_process_chain(next, obj, /*heating=*/true)) {
      const int t = clamp_heat(obj.temperature);
      changed |= (t != obj.temperature);
      obj.temperature = t;
    } else if (in_process_chain(next, obj, /*heating=*/false)) {
      const int t = clamp_cool(obj.temperature);
      changed |= (t != obj.temperature);
      obj.temperature = t;
    }
  }
  if (!changed) return silent(state);
  return effective(std::move(next), "time passes.");
}

StepResult do_go_to(const WorldState& state, const std::string& room) {
  if (state.agent_room == room) return silent(state);
  WorldState next = state;
  next.agent_room = room;
  return effective(std::move(next), "you go to the " + room + ".");
}

StepResult do_pick_up(const WorldState& state, const WorldObject& obj) {
  if (obj.location == kInventoryLocation) return silent(state);
  if (!obj.portable) {
    return rejected(state, "You can't pick up the " + obj.name + ".");
  }
  WorldState next = state;
  next.find(obj.id)->location = kInventoryLocation;
  return effective(std::move(next), "you pick up the " + obj.name + ".");
}

StepResult do_put_down(const WorldState& state, const WorldObject& obj) {
  if (obj.location != kInventoryLocation) return silent(state);
  WorldState next = state;
  next.find(obj.id)->location = state.agent_room;
  return effective(std::move(next), "you put down the " + obj.name + ".");
}

StepResult do_open(const WorldState& state, const WorldObject& obj) {
  if (!obj.openable) {
    return rejected(state, "You can't open the " + obj.name + ".");
  }
  if (obj.open) return silent(state);
  WorldState next = state;
  next.find(obj.id)->open = true;
  return effective(std::move(next), "you open the " + obj.name + ".");
}

StepResult do_close(const WorldState& state, const WorldObject& obj) {
  if (!obj.openable) {
    return rejected(state, "You can't close the " + obj.name + ".");
  }
  if (!obj.open) return silent(state);
  WorldState next = state;
  next.find(obj.id)->open = false;
  return effective(std::move(next), "you close the " + obj.name + ".");
}

StepResult do_activate(const WorldState& state, const WorldObject& obj) {
  if (!obj.has_switch) {
    return rejected(state, "You can't activate the " + obj.name + ".");
  }
  if (obj.device_active) return silent(state);
  WorldState next = state;
  next.find(obj.id)->device_active = true;
  return effective(std::move(next), "you switch on the " + obj.name + ".");
}

StepResult do_deactivate(const WorldState& state, const WorldObject& obj) {
  if (!obj.has_switch) {
    return rejected(state, "You can't deactivate the " + obj.name + ".");
  }
  if (!obj.device_active) return silent(state);
  WorldState next = state;
  next.find(obj.id)->device_active = false;
  return effective(std::move(next), "you switch off the " + obj.name + ".");
}

StepResult do_eat(const WorldState& state, const WorldObject& obj) {
  if (obj.kind != ObjectKind::SubstancePortion ||
      !substance(obj.substance).edible) {
    return rejected(state, "You can't eat the " + obj.name + ".");
  }
  WorldState next = state;
  std::erase_if(next.objects,
                [&](const WorldObject& o) { return o.id == obj.id; });
  return effective(std::move(next), "you eat the " + obj.name + ".");
}

StepResult do_water(const WorldState& state, const WorldObject& obj) {
  if (obj.kind != ObjectKind::Plant) {
    return rejected(state, "You can't water the " + obj.name + ".");
  }
  if (obj.growth_stage == kUnplanted) {
    return rejected(state,
                    "You can't water the " + obj.name +
                        " until it is planted.");
  }
  const bool has_waterer = std::any_of(
      state.objects.begin(), state.objects.end(), [&](const WorldObject& o) {
        return o.is_waterer && is_interactable(state, o.id);
      });
  if (!has_waterer) {
    return rejected(state, "You can't water the " + obj.name +
                               " without a watering vessel.");
  }
  if (obj.growth_stage >= kFinalGrowthStage) return silent(state);
  WorldState next = state;
  next.find(obj.id)->growth_stage += 1;
  return effective(std::move(next), "you water the " + obj.name + ".");
}

StepResult do_heat(const WorldState& state, const WorldObject& obj) {
  if (obj.kind != ObjectKind::SubstancePortion) {
    return rejected(state, "You can't heat the " + obj.name + ".");
  }
  if (!in_process_chain(state, obj, /*heating=*/true)) return silent(state);
  const int t = clamp_heat(obj.temperature);
  if (t == obj.temperature) return silent(state);
  WorldState next = state;
  next.find(obj.id)->temperature = t;
  return effective(std::move(next),
                   "the " + obj.name + " warms to " + std::to_string(t) +
                       " c.");
}

StepResult do_cool(const WorldState& state, const WorldObject& obj) {
  if (obj.kind != ObjectKind::SubstancePortion) {
    return rejected(state, "You can't cool the " + obj.name + ".");
  }
  if (!in_process_chain(state, obj, /*heating=*/false)) return silent(state);
  const int t = clamp_cool(obj.temperature);
  if (t == obj.temperature) return silent(state);
  WorldState next = state;
  next.find(obj.id)->temperature = t;
  return effective(std::move(next),
                   "the " + obj.name + " cools to " + std::to_string(t) +
                       " c.");
}

StepResult do_mix(const WorldState& state, const WorldObject& obj) {
  if (!obj.is_holder) {
    return rejected(state, "You can't mix the " + obj.name + ".");
  }
  if (!obj.open) {
    return rejected(state,
                    "You can't mix the " + obj.name + " while it is closed.");
  }
  std::vector<const WorldObject*> contents;
  for (const WorldObject& o : state.objects) {
    if (o.location == obj.id && o.kind == ObjectKind::SubstancePortion) {
      contents.push_back(&o);
    }
  }
  if (contents.size() != 2) return silent(state);
  const auto product =
      mixture_product(contents[0]->substance, contents[1]->substance);
  if (!product.has_value()) return silent(state);

  WorldObject made;
  made.id = "portion_mix_" + *product;
  std::replace(made.id.begin(), made.id.end(), ' ', '_');
  made.name = *product;
  made.kind = ObjectKind::SubstancePortion;
  made.substance = *product;
  made.location = obj.id;
  made.portable = true;
  made.temperature = static_cast<int>(std::floor(
      (contents[0]->temperature + contents[1]->temperature) / 2.0));

  WorldState next = state;
  const std::string a = contents[0]->id;
  const std::string b = contents[1]->id;
  std::erase_if(next.objects, [&](const WorldObject& o) {
    return o.id == a || o.id == b;
  });
  next.objects.push_back(made);
  std::sort(next.objects.begin(), next.objects.end(),
            [](const WorldObject& x, const WorldObject& y) {
              return x.id < y.id;
            });
  return effective(std::move(next), "you mix the " + obj.name +
                                        "; it now contains " + *product + ".");
}

StepResult do_use_on(const WorldState& state, const WorldObject& inst,
                     const WorldObject& target) {
  if (!inst.is_thermometer || target.kind != ObjectKind::SubstancePortion) {
    return rejected(state, "You can't use the " + inst.name + " on the " +
                               target.name + ".");
  }
  if (inst.reading == target.temperature) return silent(state);
  WorldState next = state;
  next.find(inst.id)->reading = target.temperature;
  return effective(std::move(next),
                   "the " + inst.name + " reads " +
                       std::to_string(target.temperature) + " c.");
}

StepResult do_put_in(const WorldState& state, const WorldObject& x,
                     const WorldObject& y) {
  if (!x.portable) {
    return rejected(state, "You can't move the " + x.name + ".");
  }
  if (x.id == y.id || !y.is_holder || ancestor_of(state, x.id, y)) {
    return rejected(state,
                    "You can't put the " + x.name + " in the " + y.name + ".");
  }
  if (!y.open) {
    return rejected(state, "You can't put the " + x.name + " in the " +
                               y.name + " while it is closed.");
  }
  if (x.location == y.id) return silent(state);
  WorldState next = state;
  next.find(x.id)->location = y.id;
  return effective(std::move(next),
                   "you put the " + x.name + " in the " + y.name + ".");
}

StepResult do_put_on(const WorldState& state, const WorldObject& x,
                     const WorldObject& y) {
  if (!x.portable) {
    return rejected(state, "You can't move the " + x.name + ".");
  }
  if (x.id == y.id || !y.is_surface || ancestor_of(state, x.id, y)) {
    return rejected(state,
                    "You can't put the " + x.name + " on the " + y.name + ".");
  }
  if (x.location == y.id) return silent(state);
  WorldState next = state;
  next.find(x.id)->location = y.id;
  return effective(std::move(next),
                   "you put the " + x.name + " on the " + y.name + ".");
}

StepResult do_plant_in(const WorldState& state, const WorldObject& x,
                       const WorldObject& y) {
  if (x.kind != ObjectKind::Plant) {
    return rejected(state, "You can't plant the " + x.name + ".");
  }
  if (x.growth_stage != kUnplanted) return silent(state);
  if (!y.soil) {
    return rejected(state, "You can't plant the " + x.name + " in the " +
                               y.name + ".");
  }
  WorldState next = state;
  WorldObject* plant = next.find(x.id);
  plant->location = y.id;
  plant->growth_stage = 0;
  return effective(std::move(next),
                   "you plant the " + x.name + " in the " + y.name + ".");
}

}  // namespace

std::string root_room(const WorldState& state, const std::string& id) {
  const WorldObject* obj = state.find(id);
  if (obj == nullptr) throw std::invalid_argument("unknown object id: " + id);
  return walk_to_room(state, *obj);
}

bool is_interactable(const WorldState& state, const std::string& id) {
  const WorldObject* cur = state.find(id);
  if (cur == nullptr) return false;
  for (int depth = 0; depth < kMaxHolderDepth; ++depth) {
    if (cur->location == kInventoryLocation) return true;
    if (cur->location == state.agent_room) return true;
    if (is_room_name(state, cur->location)) return false;
    const WorldObject* holder = state.find(cur->location);
    if (holder == nullptr) return false;
    if (holder->is_holder && !holder->open) return false;
    cur = holder;
  }
  return false;
}

StepResult step(const WorldState& state, const Action& action) {
  const std::string& verb = action.verb;
  if (verb == "wait") return do_wait(state);
  if (verb == "look_around") return silent(state);
  if (verb == "go_to") return do_go_to(state, action.args.at(0));

  const WorldObject* x = state.find(action.args.at(0));
  if (x == nullptr) throw std::invalid_argument("unknown object in action");
  if (!is_interactable(state, x->id)) return cant_reach(state, *x);

  if (verb == "pick_up") return do_pick_up(state, *x);
  if (verb == "put_down") return do_put_down(state, *x);
  if (verb == "open") return do_open(state, *x);
  if (verb == "close") return do_close(state, *x);
  if (verb == "activate") return do_activate(state, *x);
  if (verb == "deactivate") return do_deactivate(state, *x);
  if (verb == "eat") return do_eat(state, *x);
  if (verb == "push") return silent(state);
  if (verb == "water") return do_water(state, *x);
  if (verb == "heat") return do_heat(state, *x);
  if (verb == "cool") return do_cool(state, *x);
  if (verb == "mix") return do_mix(state, *x);

  const WorldObject* y = state.find(action.args.at(1));
  if (y == nullptr) throw std::invalid_argument("unknown object in action");
  if (!is_interactable(state, y->id)) return cant_reach(state, *y);

  if (verb == "use_on") return do_use_on(state, *x, *y);
  if (verb == "put_in") return do_put_in(state, *x, *y);
  if (verb == "put_on") return do_put_on(state, *x, *y);
  if (verb == "plant_in") return do_plant_in(state, *x, *y);
  throw std::invalid_argument("unknown verb: " + verb);
}

StepResult step_text(const WorldState& state, const std::string& text) {
  const auto action = parse_action(state, text);
  if (!action.has_value()) {
    return {state, {FeedbackClass::ParseError, "I don't understand that."}};
  }
  return step(state, *action);
}

CandidateSet enumerate_candidates(const WorldState& state) {
  std::vector<Action> actions;
  actions.push_back(make_action(state, "wait", {}));
  actions.push_back(make_action(state, "look_around", {}));
  for (const std::string& room : state.rooms) {
    actions.push_back(make_action(state, "go_to", {room}));
  }

  std::vector<const WorldObject*> reachable;
  for (const WorldObject& obj : state.objects) {
    if (is_interactable(state, obj.id)) reachable.push_back(&obj);
  }

  static const std::vector<std::string> unary = {
      "pick_up", "put_down", "open", "close", "activate", "deactivate",
      "eat",     "push",     "water", "heat", "cool",     "mix"};
  for (const WorldObject* obj : reachable) {
    for (const std::string& verb : unary) {
      actions.push_back(make_action(state, verb, {obj->id}));
    }
  }

  for (const WorldObject* inst : reachable) {
    if (!inst->is_thermometer) continue;
    for (const WorldObject* target : reachable) {
      if (target->id == inst->id) continue;
      actions.push_back(make_action(state, "use_on", {inst->id, target->id}));
    }
  }
  for (const WorldObject* x : reachable) {
    if (!x->portable) continue;
    for (const WorldObject* y : reachable) {
      if (y->id == x->id) continue;
      if (y->is_holder) {
        actions.push_back(make_action(state, "put_in", {x->id, y->id}));
      }
      if (y->is_surface) {
        actions.push_back(make_action(state, "put_on", {x->id, y->id}));
      }
    }
  }
  for (const WorldObject* x : reachable) {
    if (x->kind != ObjectKind::Plant) continue;
    for (const WorldObject* y : reachable) {
      if (y->id != x->id && y->is_holder) {
        actions.push_back(make_action(state, "plant_in", {x->id, y->id}));
      }
    }
  }

  CandidateSet out;
  out.reserve(actions.size());
  for (Action& action : actions) {
    const StepResult result = step(state, action);
    out.push_back(Candidate{std::move(action), result.feedback.cls});
  }
  std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
    return a.action.surface < b.action.surface;
  });
  return out;
}

namespace {

std::string article_for(const WorldObject& obj) {
  return obj.kind == ObjectKind::SubstancePortion ? "some" : "a";
}

/// True when the object sits behind a closed holder somewhere up its
/// chain. Concealed objects are absent from the rendered scene, matching
/// the interaction rule that a closed holder blocks access.
bool concealed(const WorldState& state, const WorldObject& obj) {
  const WorldObject* cur = state.find(obj.location);
  for (int depth = 0; cur != nullptr && depth < kMaxHolderDepth; ++depth) {
    if (cur->openable && !cur->open) return true;
    cur = state.find(cur->location);
  }
  return false;
}

std::string portion_fragment(const WorldObject& obj) {
  return obj.name + " (" + std::to_string(obj.temperature) + " c)";
}

/// One sentence fragment for a standalone object (everything except
/// portions held inside interior holders, which render in their holder's
/// containing clause).
std::string object_fragment(const WorldState& state, const WorldObject& obj) {
  std::string out = article_for(obj) + " " + obj.name;

  if (const WorldObject* holder = state.find(obj.location)) {
    out += holder->is_holder ? " (in the " : " (on the ";
    out += holder->name + ")";
  }

  if (obj.has_switch) {
    out += " (" + (obj.device_active ? obj.word_active : obj.word_inactive);
    if (obj.openable) {
      out += ", " + (obj.open ? obj.word_open : obj.word_closed);
    }
    out += ")";
  } else if (obj.openable) {
    out += " (" + (obj.open ? obj.word_open : obj.word_closed) + ")";
  }

  if (obj.kind == ObjectKind::Plant) {
    if (obj.growth_stage == kUnplanted) {
      out += " (unplanted)";
    } else {
      out += " (stage " +
             growth_stage_names()[static_cast<std::size_t>(obj.growth_stage)] +
             ")";
    }
  }
  if (obj.is_thermometer && obj.reading != kNoReading) {
    out += " (reads " + std::to_string(obj.reading) + " c)";
  }
  if (obj.kind == ObjectKind::SubstancePortion) {
    out += " (" + std::to_string(obj.temperature) + " c)";
  }

  if (obj.is_holder && (!obj.openable || obj.open)) {
    std::vector<std::string> contents;
    for (const WorldObject& o : state.objects) {
      if (o.location == obj.id && o.kind == ObjectKind::SubstancePortion) {
        contents.push_back(portion_fragment(o));
      }
    }
    std::sort(contents.begin(), contents.end());
    if (!contents.empty()) {
      out += " containing " + util::join(contents, ", ");
    }
  }
  return out;
}

int render_group(const WorldObject& obj) {
  if (obj.kind == ObjectKind::Fixture || obj.kind == ObjectKind::Device) {
    return 0;
  }
  if (obj.kind == ObjectKind::Container) return 1;
  return 2;
}

/// Standalone renderable objects rooted in the given room, in group
/// order then name order.
std::vector<const WorldObject*> room_renderables(const WorldState& state,
                                                 const std::string& room) {
  std::vector<const WorldObject*> out;
  for (const WorldObject& obj : state.objects) {
    if (walk_to_room(state, obj) != room) continue;
    if (concealed(state, obj)) continue;
    if (obj.kind == ObjectKind::SubstancePortion) {
      const WorldObject* holder = state.find(obj.location);
      if (holder != nullptr && holder->is_holder) continue;  // in clause
    }
    out.push_back(&obj);
  }
  std::sort(out.begin(), out.end(),
            [](const WorldObject* a, const WorldObject* b) {
              const int ga = render_group(*a);
              const int gb = render_group(*b);
              if (ga != gb) return ga < gb;
              return a->name < b->name;
            });
  return out;
}

}  // namespace

std::string render_state(const WorldState& state) {
  std::string out = "you are in the " + state.agent_room + ". you see:";
  const auto here = room_renderables(state, state.agent_room);
  if (here.empty()) {
    out += " nothing.";
  } else {
    for (const WorldObject* obj : here) {
      out += " " + object_fragment(state, *obj) + ".";
    }
  }

  std::vector<std::string> held;
  for (const WorldObject& obj : state.objects) {
    if (obj.location == kInventoryLocation) {
      held.push_back(object_fragment(state, obj));
    }
  }
  std::sort(held.begin(), held.end());
  if (held.empty()) {
    out += " your inventory is empty.";
  } else {
    out += " your inventory contains: " + util::join(held, ", ") + ".";
  }
  return out;
}

}  // namespace cwm::world
