#include "cablesim/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>

#include "cablesim/toml_lite.hpp"

namespace cablesim {

int SweepSpec::offset_count() const {
  return static_cast<int>(std::floor((offset_max - offset_min) / step + 1e-9)) + 1;
}

PipelineExecutor ScenarioConfig::make_executor(const Vec2& goal_offset) const {
  ExecutionConfig cfg = exec;
  cfg.goal_offset = goal_offset;
  cfg.scene_hash = scene_hash;
  return PipelineExecutor(scene, arm, errors, robot_base, cfg, finger);
}

namespace {

// Accumulates schema errors with field paths while reading the parse tree.
struct Reader {
  const toml::Table& root;
  std::vector<std::string>& errors;

  void fail(const std::string& path, const std::string& msg) {
    errors.push_back(path + ": " + msg);
  }

  double number(const toml::Table& t, const std::string& path, const std::string& key,
                double fallback) {
    const toml::Value* v = t.find(key);
    if (v == nullptr) return fallback;
    if (!v->is_number()) {
      fail(path + "." + key, "expected a number");
      return fallback;
    }
    return v->as_number();
  }

  bool boolean(const toml::Table& t, const std::string& path, const std::string& key,
               bool fallback) {
    const toml::Value* v = t.find(key);
    if (v == nullptr) return fallback;
    if (!v->is_bool()) {
      fail(path + "." + key, "expected a boolean");
      return fallback;
    }
    return v->as_bool();
  }

  std::string text(const toml::Table& t, const std::string& path, const std::string& key,
                   const std::string& fallback) {
    const toml::Value* v = t.find(key);
    if (v == nullptr) return fallback;
    if (!v->is_string()) {
      fail(path + "." + key, "expected a string");
      return fallback;
    }
    return v->as_string();
  }

  Vec3 vec3(const toml::Table& t, const std::string& path, const std::string& key,
            const Vec3& fallback) {
    const toml::Value* v = t.find(key);
    if (v == nullptr) return fallback;
    if (!v->is_array() || v->as_array().size() != 3) {
      fail(path + "." + key, "expected [x, y, z]");
      return fallback;
    }
    Vec3 out;
    for (int i = 0; i < 3; ++i) {
      const auto& e = v->as_array()[i];
      if (!e.is_number()) {
        fail(path + "." + key, "expected numeric components");
        return fallback;
      }
      out[i] = e.as_number();
    }
    return out;
  }

  std::vector<Vec3> vec3_list(const toml::Table& t, const std::string& path,
                              const std::string& key) {
    std::vector<Vec3> out;
    const toml::Value* v = t.find(key);
    if (v == nullptr) return out;
    if (!v->is_array()) {
      fail(path + "." + key, "expected an array of [x, y, z]");
      return out;
    }
    int i = 0;
    for (const auto& e : v->as_array()) {
      if (!e.is_array() || e.as_array().size() != 3 || !e.as_array()[0].is_number()) {
        fail(path + "." + key + "[" + std::to_string(i) + "]", "expected [x, y, z]");
        continue;
      }
      out.emplace_back(e.as_array()[0].as_number(), e.as_array()[1].as_number(),
                       e.as_array()[2].as_number());
      ++i;
    }
    return out;
  }
};

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

}  // namespace

LoadResult load_scenario_text(const std::string& text) {
  LoadResult result;
  const auto parsed = toml::parse(text);
  result.errors = parsed.errors;
  if (!result.errors.empty()) return result;

  const toml::Table& root = parsed.root;
  Reader r{root, result.errors};
  ScenarioConfig cfg;

  cfg.schema_version = static_cast<int>(r.number(root, "", "schema_version", 1));
  if (cfg.schema_version != 1) r.fail("schema_version", "unsupported version");
  cfg.name = r.text(root, "", "name", "unnamed");

  // --- robot ---
  if (const toml::Table* t = root.table("robot")) {
    cfg.robot_base = Transform::from_translation(r.vec3(*t, "robot", "base", {0.0, -550.0, 0.0}));
    cfg.exec.home = Transform::from_translation(r.vec3(*t, "robot", "home", {0.0, -150.0, 120.0}));
    cfg.exec.tcp_speed = r.number(*t, "robot", "tcp_speed", 100.0);
    if (cfg.exec.tcp_speed <= 0.0) r.fail("robot.tcp_speed", "must be positive");
    const std::string mode = r.text(*t, "robot", "mode", "joint");
    if (mode == "joint")
      cfg.exec.mode = CommandMode::JointInput;
    else if (mode == "pose")
      cfg.exec.mode = CommandMode::PoseInput;
    else
      r.fail("robot.mode", "expected 'joint' or 'pose'");
    cfg.exec.motion_step = r.number(*t, "robot", "motion_step", 0.1);
  } else {
    r.fail("robot", "missing table");
  }

  // --- error model ---
  if (const toml::Table* t = root.table("error_model")) {
    cfg.errors.pose_mode_sigma = r.number(*t, "error_model", "pose_mode_sigma", 0.7);
    cfg.errors.pose_mode_max = r.number(*t, "error_model", "pose_mode_max", 2.0);
    cfg.errors.joint_mode_sigma = r.number(*t, "error_model", "joint_mode_sigma", 0.05);
    cfg.errors.joint_mode_max = r.number(*t, "error_model", "joint_mode_max", 0.3);
    cfg.errors.taught_bias = r.vec3(*t, "error_model", "taught_bias", {0.0, 0.5, 0.0});
    try {
      cfg.errors.validate();
    } catch (const ConfigError& e) {
      r.fail("error_model", e.what());
    }
  }

  // --- cable ---
  Vec3 cable_start{0.0, 0.0, 0.0}, cable_end{300.0, 0.0, 0.0};
  if (const toml::Table* t = root.table("cable")) {
    cfg.scene.cable_params.total_length = r.number(*t, "cable", "total_length", 300.0);
    cfg.scene.cable_params.node_count = static_cast<int>(r.number(*t, "cable", "node_count", 60));
    cfg.scene.cable_params.bending_stiffness = r.number(*t, "cable", "bending_stiffness", 50.0);
    cfg.scene.cable_params.weight_per_length = r.number(*t, "cable", "weight_per_length", 0.01);
    cable_start = r.vec3(*t, "cable", "start", cable_start);
    cable_end = r.vec3(*t, "cable", "end", cable_end);
    try {
      cfg.scene.cable_params.validate();
    } catch (const ConfigError& e) {
      r.fail("cable", e.what());
    }
  }
  if (result.errors.empty())
    cfg.scene.cable = CableState::straight_line(cfg.scene.cable_params, cable_start, cable_end);

  // --- gripper ---
  if (const toml::Table* t = root.table("gripper")) {
    const std::string finger = r.text(*t, "gripper", "finger", "form_fit");
    if (finger == "form_fit")
      cfg.finger = FingerKind::FormFitParallel;
    else if (finger == "scott_russell")
      cfg.finger = FingerKind::ScottRussell;
    else
      r.fail("gripper.finger", "expected 'form_fit' or 'scott_russell'");
    const double hang = r.number(*t, "gripper", "plug_hang", 30.0);
    cfg.exec.plug_in_tcp = Transform::from_translation({0.0, 0.0, -hang});
  }

  // --- obstacles ---
  std::map<std::string, int> ids;
  int next_id = 100;
  if (const auto it = root.table_arrays.find("obstacles"); it != root.table_arrays.end()) {
    int i = 0;
    for (const auto& t : it->second) {
      const std::string path = "obstacles[" + std::to_string(i) + "]";
      Box3 box;
      box.pose = Transform::from_translation(r.vec3(t, path, "center", Vec3::Zero()));
      const double yaw = r.number(t, path, "yaw", 0.0);
      box.pose.rotation = Rotation::about_z(yaw);
      box.half_extents = r.vec3(t, path, "half_extents", {1.0, 1.0, 1.0});
      if (box.half_extents.minCoeff() <= 0.0) r.fail(path + ".half_extents", "must be positive");
      box.id = next_id++;
      ids[r.text(t, path, "name", "obstacle_" + std::to_string(i))] = box.id;
      cfg.scene.obstacles.push_back(box);
      ++i;
    }
  }

  // --- plugs ---
  next_id = 400;
  if (const auto it = root.table_arrays.find("plugs"); it != root.table_arrays.end()) {
    int i = 0;
    for (const auto& t : it->second) {
      const std::string path = "plugs[" + std::to_string(i) + "]";
      Plug plug;
      plug.name = r.text(t, path, "name", "plug_" + std::to_string(i));
      const std::string kind = r.text(t, path, "kind", "faston");
      if (kind == "faston")
        plug.kind = PlugKind::Faston;
      else if (kind == "industrial")
        plug.kind = PlugKind::Industrial;
      else
        r.fail(path + ".kind", "expected 'faston' or 'industrial'");
      plug.body.pose = Transform::from_translation(r.vec3(t, path, "center", Vec3::Zero()));
      plug.body.half_extents = r.vec3(t, path, "half_extents", {0.4, 3.0, 7.5});
      plug.thickness = r.number(t, path, "thickness", 0.8);
      plug.width = r.number(t, path, "width", 6.0);
      plug.height = r.number(t, path, "height", 30.0);
      plug.roll = r.number(t, path, "roll", 0.0);
      plug.cable_attach_s = r.number(t, path, "attach_s", 0.0);
      if (plug.thickness <= 0.0 || plug.width <= 0.0) r.fail(path, "plug dimensions must be positive");
      plug.id = next_id++;
      plug.body.id = plug.id;
      ids[plug.name] = plug.id;
      cfg.scene.plugs.push_back(plug);
      ++i;
    }
  }

  // --- sockets ---
  next_id = 200;
  if (const auto it = root.table_arrays.find("sockets"); it != root.table_arrays.end()) {
    int i = 0;
    for (const auto& t : it->second) {
      const std::string path = "sockets[" + std::to_string(i) + "]";
      Socket socket;
      socket.name = r.text(t, path, "name", "socket_" + std::to_string(i));
      socket.pose = Transform::from_translation(r.vec3(t, path, "slot", Vec3::Zero()));
      socket.pose.rotation = Rotation::about_z(r.number(t, path, "yaw", 0.0));
      socket.tol_x = r.number(t, path, "tol_x", 0.45);
      socket.tol_y = r.number(t, path, "tol_y", 0.45);
      socket.chamfer_y = r.number(t, path, "chamfer_y", 1.05);
      socket.clasp = r.boolean(t, path, "clasp", false);
      if (socket.tol_x <= 0.0 || socket.tol_y <= 0.0) r.fail(path, "tolerances must be positive");
      socket.body.pose =
          Transform::from_translation(r.vec3(t, path, "body_center", socket.pose.translation));
      socket.body.pose.rotation = socket.pose.rotation;
      socket.body.half_extents = r.vec3(t, path, "body_half_extents", {5.0, 5.0, 4.0});
      socket.id = next_id++;
      socket.body.id = socket.id;
      ids[socket.name] = socket.id;
      cfg.scene.sockets.push_back(socket);
      ++i;
    }
  }

  // --- forks ---
  next_id = 300;
  if (const auto it = root.table_arrays.find("forks"); it != root.table_arrays.end()) {
    int i = 0;
    for (const auto& t : it->second) {
      const std::string path = "forks[" + std::to_string(i) + "]";
      RoutingFork fork;
      fork.name = r.text(t, path, "name", "fork_" + std::to_string(i));
      fork.pose = Transform::from_translation(r.vec3(t, path, "position", Vec3::Zero()));
      fork.approach_dir = r.vec3(t, path, "approach", {0.0, 0.0, -1.0});
      if (fork.approach_dir.norm() < 1e-9)
        r.fail(path + ".approach", "must be a non-zero direction");
      else
        fork.approach_dir.normalize();
      fork.capture_radius = r.number(t, path, "capture_radius", 3.0);
      fork.clearance_to_base = r.number(t, path, "clearance_to_base", 25.0);
      fork.id = next_id++;
      ids[fork.name] = fork.id;
      cfg.scene.forks.push_back(fork);
      ++i;
    }
  }

  // --- magazine ---
  if (const toml::Table* t = root.table("magazine")) {
    cfg.scene.magazine.slots.clear();
    for (const auto& slot : r.vec3_list(*t, "magazine", "slots"))
      cfg.scene.magazine.slots.push_back(Transform::from_translation(slot));
    cfg.scene.magazine.holds_both_ends = r.boolean(*t, "magazine", "holds_both_ends", false);
    cfg.scene.magazine.id = 500;
  }

  // --- correction device ---
  if (const toml::Table* t = root.table("correction_device")) {
    CorrectionDevice device;
    device.pose = Transform::from_translation(r.vec3(*t, "correction_device", "gap_center",
                                                     Vec3::Zero()));
    device.gap_width = r.number(*t, "correction_device", "gap_width", 4.0);
    device.plug_width = r.number(*t, "correction_device", "plug_width", 6.0);
    device.degenerate_eps = r.number(*t, "correction_device", "degenerate_eps", 0.05);
    const Vec3 pillar_he = r.vec3(*t, "correction_device", "pillar_half_extents", {3.0, 3.0, 15.0});
    const double dy = 0.5 * device.gap_width + pillar_he.y();
    for (int k = 0; k < 2; ++k) {
      Box3 pillar;
      pillar.pose = device.pose * Transform::from_translation({0.0, k == 0 ? -dy : dy, 0.0});
      pillar.half_extents = pillar_he;
      pillar.id = 510 + k;
      device.pillars[k] = pillar;
      cfg.scene.obstacles.push_back(pillar);
    }
    try {
      device.validate();
    } catch (const ConfigError& e) {
      r.fail("correction_device", e.what());
    }
    cfg.scene.correction = device;
  }

  // --- maneuvers ---
  if (const toml::Table* t = root.table("insertion")) {
    cfg.exec.side_standoff = r.number(*t, "insertion", "side_standoff", 6.0);
    cfg.exec.search_span = r.number(*t, "insertion", "search_span", 15.0);
    cfg.exec.raise_clearance = r.number(*t, "insertion", "raise_clearance", 5.0);
    cfg.exec.insert_depth = r.number(*t, "insertion", "insert_depth", 6.0);
    cfg.exec.insert_hover = r.number(*t, "insertion", "hover", 30.0);
    if (cfg.exec.side_standoff < 3.0) r.fail("insertion.side_standoff", "must be at least 3 mm");
  }
  if (const toml::Table* t = root.table("timing"))
    cfg.exec.gripper_dwell_s = r.number(*t, "timing", "gripper_dwell", 1.0);
  if (const toml::Table* t = root.table("correction")) {
    cfg.exec.correction_drop = r.number(*t, "correction", "drop", 25.0);
    cfg.exec.correction_rise = r.number(*t, "correction", "rise", 35.0);
  }

  // --- routing ---
  if (const toml::Table* t = root.table("routing")) {
    cfg.exec.route_grip_arc = r.number(*t, "routing", "grip_arc", 15.0);
    cfg.exec.tail_grip_arc = r.number(*t, "routing", "tail_grip_arc", 20.0);
    cfg.exec.end_slide_waypoints = r.vec3_list(*t, "routing", "end_slide_waypoints");
  }
  if (const auto it = root.table_arrays.find("route_legs"); it != root.table_arrays.end()) {
    int i = 0;
    for (const auto& t : it->second) {
      const std::string path = "route_legs[" + std::to_string(i) + "]";
      RouteLeg leg;
      const std::string fork_name = r.text(t, path, "fork", "");
      if (ids.count(fork_name) == 0)
        r.fail(path + ".fork", "unknown fork '" + fork_name + "'");
      else
        leg.fork_id = ids[fork_name];
      leg.approach_distance = r.number(t, path, "approach_distance", 10.0);
      leg.waypoints = r.vec3_list(t, path, "waypoints");
      if (leg.waypoints.empty()) r.fail(path + ".waypoints", "needs at least one waypoint");
      cfg.exec.route_legs.push_back(leg);
      ++i;
    }
  }

  // --- pipeline steps ---
  if (const toml::Table* t = root.table("pipeline")) {
    const toml::Value* v = t->find("steps");
    if (v == nullptr || !v->is_array()) {
      r.fail("pipeline.steps", "expected an array of step strings");
    } else {
      int i = 0;
      for (const auto& e : v->as_array()) {
        const std::string path = "pipeline.steps[" + std::to_string(i) + "]";
        if (!e.is_string()) {
          r.fail(path, "expected a string");
          ++i;
          continue;
        }
        const auto parts = split(e.as_string(), ':');
        PipelineStep step{};
        auto resolve = [&](const std::string& name, const char* what) {
          if (ids.count(name) == 0) {
            r.fail(path, std::string("unknown ") + what + " '" + name + "'");
            return -1;
          }
          return ids[name];
        };
        const std::string& verb = parts[0];
        if (verb == "pick" && parts.size() == 2) {
          step.kind = StepKind::PickFromMagazine;
          step.plug_id = resolve(parts[1], "plug");
        } else if (verb == "pick_second" && parts.size() == 2) {
          step.kind = StepKind::PickSecondPlug;
          step.plug_id = resolve(parts[1], "plug");
        } else if (verb == "insert_contact" && parts.size() == 3) {
          step.kind = StepKind::InsertContactBased;
          step.plug_id = resolve(parts[1], "plug");
          step.socket_id = resolve(parts[2], "socket");
        } else if (verb == "insert_direct" && parts.size() == 3) {
          step.kind = StepKind::InsertDirect;
          step.plug_id = resolve(parts[1], "plug");
          step.socket_id = resolve(parts[2], "socket");
        } else if (verb == "route" && parts.size() == 2) {
          step.kind = StepKind::RouteSegment;
          step.fork_id = resolve(parts[1], "fork");
        } else if (verb == "correct_orientation" && parts.size() == 1) {
          step.kind = StepKind::CorrectOrientation;
        } else if (verb == "regrip" && parts.size() == 2) {
          step.kind = StepKind::RegripPlug;
          step.plug_id = resolve(parts[1], "plug");
        } else {
          r.fail(path, "unrecognized step '" + e.as_string() + "'");
        }
        cfg.pipeline.push_back(step);
        ++i;
      }
    }
  }

  // Route legs must exist for every routed fork.
  {
    int i = 0;
    for (const auto& step : cfg.pipeline) {
      if (step.kind == StepKind::RouteSegment && step.fork_id >= 0) {
        bool found = false;
        for (const auto& leg : cfg.exec.route_legs) found |= leg.fork_id == step.fork_id;
        if (!found)
          r.fail("pipeline.steps[" + std::to_string(i) + "]", "no route leg for this fork");
      }
      ++i;
    }
  }

  // --- sweep defaults ---
  if (const toml::Table* t = root.table("sweep")) {
    const std::string axis = r.text(*t, "sweep", "axis", "y");
    if (axis != "x" && axis != "y")
      r.fail("sweep.axis", "expected 'x' or 'y'");
    else
      cfg.sweep.axis = axis[0];
    cfg.sweep.offset_min = r.number(*t, "sweep", "min", -4.0);
    cfg.sweep.offset_max = r.number(*t, "sweep", "max", 4.0);
    cfg.sweep.step = r.number(*t, "sweep", "step", 0.25);
    cfg.sweep.trials = static_cast<int>(r.number(*t, "sweep", "trials", 5));
    if (cfg.sweep.step <= 0.0) r.fail("sweep.step", "must be positive");
    if (cfg.sweep.trials < 1) r.fail("sweep.trials", "must be at least 1");
    if (cfg.sweep.offset_max < cfg.sweep.offset_min) r.fail("sweep", "max must be >= min");
  }

  // RoutePlan waypoints must be reachable free space for the gripper tip
  // (the tip body extends upward from the jaw point).
  {
    Box3 tip;
    tip.half_extents = {2.0, 4.0, 10.0};
    auto check_wp = [&](const Vec3& wp, const std::string& path) {
      tip.pose = Transform::from_translation(wp + Vec3(0.0, 0.0, tip.half_extents.z()));
      for (const auto& obs : cfg.scene.obstacles) {
        if (box_box_clearance(tip, obs) <= 0.0) {
          r.fail(path, "gripper body collides with an obstacle at plan time");
          return;
        }
      }
    };
    int li = 0;
    for (const auto& leg : cfg.exec.route_legs) {
      int wi = 0;
      for (const auto& wp : leg.waypoints)
        check_wp(wp, "route_legs[" + std::to_string(li) + "].waypoints[" + std::to_string(wi++) +
                         "]");
      ++li;
    }
    int wi = 0;
    for (const auto& wp : cfg.exec.end_slide_waypoints)
      check_wp(wp, "routing.end_slide_waypoints[" + std::to_string(wi++) + "]");
  }

  try {
    cfg.arm.validate();
  } catch (const ConfigError& e) {
    r.fail("robot.arm", e.what());
  }

  cfg.scene_hash = [&] {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(toml::canonical_dump(root))));
    return std::string(buf);
  }();

  if (!result.errors.empty()) return result;
  result.config = std::move(cfg);
  return result;
}

LoadResult load_scenario(const std::string& path) {
  const auto parsed = toml::parse_file(path);
  if (!parsed.errors.empty()) {
    LoadResult r;
    r.errors = parsed.errors;
    return r;
  }
  // Re-read through the text loader to keep a single code path.
  std::string dump;  // parse_file succeeded; reparse from the original file
  {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (f == nullptr) {
      LoadResult r;
      r.errors.push_back("cannot open file: " + path);
      return r;
    }
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof(buf), f)) > 0) dump.append(buf, n);
    std::fclose(f);
  }
  return load_scenario_text(dump);
}

ScenarioConfig load_scenario_or_throw(const std::string& path) {
  auto result = load_scenario(path);
  if (!result.config) {
    std::string msg = "scenario '" + path + "' failed validation:";
    for (const auto& e : result.errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return std::move(*result.config);
}

}  // namespace cablesim
