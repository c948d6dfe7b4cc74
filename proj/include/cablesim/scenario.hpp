#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cablesim/pipeline.hpp"
#include "cablesim/scene.hpp"

namespace cablesim {

struct SweepSpec {
  char axis = 'y';
  double offset_min = -4.0;  // mm
  double offset_max = 4.0;
  double step = 0.25;
  int trials = 5;
  std::uint64_t seed_base = 1;

  int offset_count() const;
  double offset_at(int i) const { return offset_min + i * step; }
};

struct ScenarioConfig {
  int schema_version = 1;
  std::string name;

  ArmParams arm = ArmParams::default_seven_dof();
  Transform robot_base;
  ErrorModel errors;
  FingerKind finger = FingerKind::FormFitParallel;

  WorkspaceScene scene;
  std::vector<PipelineStep> pipeline;
  ExecutionConfig exec;
  SweepSpec sweep;

  std::string scene_hash;

  PipelineExecutor make_executor(const Vec2& goal_offset = {0.0, 0.0}) const;
};

struct LoadResult {
  std::optional<ScenarioConfig> config;
  std::vector<std::string> errors;  // schema errors with field paths
};

LoadResult load_scenario(const std::string& path);
LoadResult load_scenario_text(const std::string& text);

// Throwing wrapper; joins schema errors into the exception message.
ScenarioConfig load_scenario_or_throw(const std::string& path);

}  // namespace cablesim
