#include "cablesim/scene.hpp"

#include <algorithm>

namespace cablesim {

const Socket* WorkspaceScene::socket_by_id(int id) const {
  for (const auto& s : sockets)
    if (s.id == id) return &s;
  return nullptr;
}

const RoutingFork* WorkspaceScene::fork_by_id(int id) const {
  for (const auto& f : forks)
    if (f.id == id) return &f;
  return nullptr;
}

Plug* WorkspaceScene::plug_by_id(int id) {
  for (auto& p : plugs)
    if (p.id == id) return &p;
  return nullptr;
}

std::vector<Box3> WorkspaceScene::collision_boxes(const std::vector<int>& exclude) const {
  auto excluded = [&](int id) {
    return std::find(exclude.begin(), exclude.end(), id) != exclude.end();
  };
  std::vector<Box3> boxes;
  for (const auto& b : obstacles)
    if (!excluded(b.id)) boxes.push_back(b);
  for (const auto& s : sockets)
    if (!excluded(s.id)) boxes.push_back(s.body);
  return boxes;
}

}  // namespace cablesim
