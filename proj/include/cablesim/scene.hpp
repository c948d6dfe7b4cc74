#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cablesim/cable.hpp"
#include "cablesim/devices.hpp"
#include "cablesim/geometry.hpp"

namespace cablesim {

// Declarative workspace layout. A pipeline run owns a copy and mutates the
// cable state and plug poses as it goes.
struct WorkspaceScene {
  std::vector<Box3> obstacles;  // board, clutter components, pillars
  std::vector<Socket> sockets;
  std::vector<RoutingFork> forks;
  Magazine magazine;
  std::optional<CorrectionDevice> correction;

  CableParams cable_params;
  CableState cable;
  std::vector<Plug> plugs;  // [0] attached at s=0, [1] at s=total_length

  const Socket* socket_by_id(int id) const;
  const RoutingFork* fork_by_id(int id) const;
  Plug* plug_by_id(int id);

  // Boxes the robot's attached bodies may collide with; entries whose id is
  // in `exclude` are skipped (e.g. the socket being entered).
  std::vector<Box3> collision_boxes(const std::vector<int>& exclude = {}) const;
};

}  // namespace cablesim
