#include "cwm/world/types.hpp"

#include <algorithm>

namespace cwm::world {

const WorldObject* WorldState::find(const std::string& id) const {
  for (const auto& obj : objects) {
    if (obj.id == id) return &obj;
  }
  return nullptr;
}

WorldObject* WorldState::find(const std::string& id) {
  for (auto& obj : objects) {
    if (obj.id == id) return &obj;
  }
  return nullptr;
}

const WorldObject* WorldState::find_by_name(const std::string& name) const {
  for (const auto& obj : objects) {
    if (obj.name == name) return &obj;
  }
  return nullptr;
}

std::vector<std::string> WorldState::inventory_ids() const {
  std::vector<std::string> ids;
  for (const auto& obj : objects) {
    if (obj.location == kInventoryLocation) ids.push_back(obj.id);
  }
  return ids;
}

bool WorldState::structurally_equal(const WorldState& other) const {
  return rooms == other.rooms && agent_room == other.agent_room &&
         objects == other.objects;
}

}  // namespace cwm::world
