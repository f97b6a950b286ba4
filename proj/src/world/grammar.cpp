#include "cwm/world/grammar.hpp"

#include <algorithm>
#include <stdexcept>

#include "cwm/util/text.hpp"
#include "cwm/world/rules.hpp"

namespace cwm::world {

namespace {

bool is_room(const WorldState& state, const std::string& name) {
  return std::find(state.rooms.begin(), state.rooms.end(), name) !=
         state.rooms.end();
}

std::string display_name(const WorldState& state, const std::string& verb_key,
                         const std::string& arg) {
  if (verb_key == "go_to") {
    if (!is_room(state, arg)) throw std::invalid_argument("unknown room: " + arg);
    return arg;
  }
  const WorldObject* obj = state.find(arg);
  if (obj == nullptr) throw std::invalid_argument("unknown object id: " + arg);
  return obj->name;
}

/// Resolves a slot value (joined token run) to an id. Rooms resolve for
/// go_to only; everything else resolves against display names.
std::optional<std::string> resolve_slot(const WorldState& state,
                                        const std::string& verb_key,
                                        const std::string& value) {
  if (verb_key == "go_to") {
    if (is_room(state, value)) return value;
    return std::nullopt;
  }
  if (const WorldObject* obj = state.find_by_name(value)) return obj->id;
  return std::nullopt;
}

bool match_pattern(const WorldState& state, const VerbRule& rule,
                   const std::vector<std::string>& pattern_tokens,
                   const std::vector<std::string>& text_tokens,
                   std::size_t pi, std::size_t ti,
                   std::vector<std::string>& args) {
  if (pi == pattern_tokens.size()) return ti == text_tokens.size();
  const std::string& pt = pattern_tokens[pi];
  if (pt == "<x>" || pt == "<y>") {
    // A slot consumes one or more tokens; try every span.
    for (std::size_t len = 1; ti + len <= text_tokens.size(); ++len) {
      std::vector<std::string> span(text_tokens.begin() + ti,
                                    text_tokens.begin() + ti + len);
      auto id = resolve_slot(state, rule.key, util::join(span, " "));
      if (!id.has_value()) continue;
      args.push_back(*id);
      if (match_pattern(state, rule, pattern_tokens, text_tokens, pi + 1,
                        ti + len, args)) {
        return true;
      }
      args.pop_back();
    }
    return false;
  }
  if (ti >= text_tokens.size() || text_tokens[ti] != pt) return false;
  return match_pattern(state, rule, pattern_tokens, text_tokens, pi + 1,
                       ti + 1, args);
}

}  // namespace

Action make_action(const WorldState& state, const std::string& verb_key,
                   const std::vector<std::string>& args) {
  const VerbRule& rule = verb_rule(verb_key);
  if (static_cast<int>(args.size()) != rule.arity) {
    throw std::invalid_argument("verb " + verb_key + " expects " +
                                std::to_string(rule.arity) + " args");
  }
  std::string surface = rule.pattern;
  const char* slots[] = {"<x>", "<y>"};
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string name = display_name(state, verb_key, args[i]);
    const auto pos = surface.find(slots[i]);
    if (pos == std::string::npos) throw std::logic_error("bad pattern");
    surface.replace(pos, 3, name);
  }
  return Action{verb_key, args, surface};
}

std::optional<Action> parse_action(const WorldState& state,
                                   const std::string& text) {
  const std::vector<std::string> text_tokens = util::split_tokens(text);
  if (text_tokens.empty()) return std::nullopt;
  for (const VerbRule& rule : verb_table()) {
    const std::vector<std::string> pattern_tokens =
        util::split_whitespace(rule.pattern);
    std::vector<std::string> args;
    if (match_pattern(state, rule, pattern_tokens, text_tokens, 0, 0, args)) {
      return make_action(state, rule.key, args);
    }
  }
  return std::nullopt;
}

}  // namespace cwm::world
