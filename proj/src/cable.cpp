#include "cablesim/cable.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cablesim {

void CableParams::validate() const {
  if (node_count < 3) throw ConfigError("cable needs at least 3 nodes");
  if (total_length <= 0.0 || bending_stiffness <= 0.0 || weight_per_length <= 0.0)
    throw ConfigError("cable parameters must be positive");
}

CableState CableState::straight_line(const CableParams& params, const Vec3& from, const Vec3& to) {
  params.validate();
  CableState state;
  state.nodes.resize(params.node_count);
  for (int i = 0; i < params.node_count; ++i) {
    const double t = static_cast<double>(i) / (params.node_count - 1);
    state.nodes[i] = from + t * (to - from);
  }
  return state;
}

double cable_energy(const CableParams& params, const std::vector<Vec3>& nodes) {
  const double ell = params.segment_length();
  const int n = static_cast<int>(nodes.size());
  double e = 0.0;
  for (int i = 1; i + 1 < n; ++i) {
    const Vec3 u = (nodes[i] - nodes[i - 1]).normalized();
    const Vec3 v = (nodes[i + 1] - nodes[i]).normalized();
    const double theta = std::atan2(u.cross(v).norm(), std::clamp(u.dot(v), -1.0, 1.0));
    e += params.bending_stiffness * theta * theta / ell;
  }
  for (const auto& p : nodes) e += params.weight_per_length * ell * p.z();
  return e;
}

namespace {

struct GripTarget {
  double s;      // arc length along the cable
  Vec3 point;
  bool bead;     // bead slides (nearest point recomputed per sweep)
};

void add_gradient(const CableParams& params, const std::vector<Vec3>& nodes,
                  std::vector<Vec3>& grad) {
  const double ell = params.segment_length();
  const int n = static_cast<int>(nodes.size());
  const double wg = params.weight_per_length * ell;
  for (int i = 0; i < n; ++i) grad[i].z() += wg;

  for (int i = 1; i + 1 < n; ++i) {
    const Vec3 e1 = nodes[i] - nodes[i - 1];
    const Vec3 e2 = nodes[i + 1] - nodes[i];
    const double n1 = e1.norm(), n2 = e2.norm();
    if (n1 < 1e-12 || n2 < 1e-12) continue;
    const Vec3 u = e1 / n1, v = e2 / n2;
    const double c = std::clamp(u.dot(v), -1.0, 1.0);
    double s = u.cross(v).norm();
    const double theta = std::atan2(s, c);
    if (s < 1e-12) {
      if (c > 0.0) continue;  // straight: zero force
      s = 1e-9;               // folded back: finite unfolding force
    }
    const double coef = 2.0 * params.bending_stiffness * theta / ell;
    const Vec3 ga = (v - c * u) / (s * n1);
    const Vec3 gc = -(u - c * v) / (s * n2);
    grad[i - 1] += coef * ga;
    grad[i + 1] += coef * gc;
    grad[i] -= coef * (ga + gc);
  }
}

// Splits arc length s into (segment index, fraction).
std::pair<int, double> locate(double s, double ell, int n) {
  int seg = static_cast<int>(std::floor(s / ell));
  seg = std::clamp(seg, 0, n - 2);
  const double f = std::clamp(s / ell - seg, 0.0, 1.0);
  return {seg, f};
}

struct Projector {
  const CableParams& params;
  const std::vector<Box3>& obstacles;
  const CableConstraints& constraints;
  std::vector<double> inv_mass;
  std::vector<PinNode> taut_pins;  // nodes inside exactly-taut spans are rigid

  Projector(const CableParams& p, const std::vector<Box3>& obs, const CableConstraints& c,
            int node_count)
      : params(p), obstacles(obs), constraints(c), inv_mass(node_count, 1.0) {
    for (const auto& pin : c.pins) inv_mass[pin.index] = 0.0;
    for (const auto& clip : c.clips) inv_mass[clip.index] = 0.0;

    // An exactly-taut span between two hard points admits only the straight
    // line; Gauss-Seidel alone converges too slowly there, so place those
    // nodes directly.
    std::vector<PinNode> hard;
    for (const auto& pin : c.pins) hard.push_back(pin);
    for (const auto& clip : c.clips) hard.push_back({clip.index, clip.point});
    if (c.tight) {
      const int idx = std::clamp(
          static_cast<int>(std::lround(c.tight->s / p.segment_length())), 0, node_count - 1);
      hard.push_back({idx, c.tight->grip_point});
    }
    std::sort(hard.begin(), hard.end(),
              [](const PinNode& a, const PinNode& b) { return a.index < b.index; });
    for (std::size_t k = 1; k < hard.size(); ++k) {
      const PinNode& a = hard[k - 1];
      const PinNode& b = hard[k];
      if (b.index <= a.index + 1) continue;
      const double arc = (b.index - a.index) * p.segment_length();
      const double chord = (b.position - a.position).norm();
      if (chord < arc * (1.0 - 1e-9)) continue;
      for (int j = a.index + 1; j < b.index; ++j) {
        const double t = static_cast<double>(j - a.index) / (b.index - a.index);
        taut_pins.push_back({j, a.position + t * (b.position - a.position)});
        inv_mass[j] = 0.0;
      }
    }
  }

  void apply_hard_points(std::vector<Vec3>& x) const {
    for (const auto& pin : constraints.pins) x[pin.index] = pin.position;
    for (const auto& clip : constraints.clips) x[clip.index] = clip.point;
    for (const auto& pin : taut_pins) x[pin.index] = pin.position;
  }

  void project_pair(std::vector<Vec3>& x, int i, int j) const {
    const double wi = inv_mass[i], wj = inv_mass[j];
    const double wsum = wi + wj;
    if (wsum == 0.0) return;
    Vec3 d = x[j] - x[i];
    const double len = d.norm();
    if (len < 1e-300) return;
    const Vec3 corr = d * ((len - params.segment_length()) / (len * wsum));
    x[i] += wi * corr;
    x[j] -= wj * corr;
  }

  void project_grip(std::vector<Vec3>& x, const GripTarget& g) const {
    const int n = static_cast<int>(x.size());
    int seg;
    double f;
    if (g.bead) {
      // Nearest polyline point slides freely through the jaws.
      double best = std::numeric_limits<double>::infinity();
      seg = 0;
      f = 0.0;
      for (int i = 0; i + 1 < n; ++i) {
        const Vec3 d = x[i + 1] - x[i];
        const double t =
            std::clamp(d.squaredNorm() > 0 ? (g.point - x[i]).dot(d) / d.squaredNorm() : 0.0, 0.0,
                       1.0);
        const double dist = (x[i] + t * d - g.point).squaredNorm();
        if (dist < best) {
          best = dist;
          seg = i;
          f = t;
        }
      }
    } else {
      std::tie(seg, f) = locate(g.s, params.segment_length(), n);
    }
    const Vec3 at = (1.0 - f) * x[seg] + f * x[seg + 1];
    const Vec3 err = g.point - at;
    const double wa = inv_mass[seg] * (1.0 - f), wb = inv_mass[seg + 1] * f;
    const double denom = (1.0 - f) * wa + f * wb;
    if (denom < 1e-12) return;
    x[seg] += wa * err / denom;
    x[seg + 1] += wb * err / denom;
  }

  void project_obstacles(std::vector<Vec3>& x) const {
    const int n = static_cast<int>(x.size());
    for (int i = 0; i < n; ++i) {
      if (inv_mass[i] == 0.0) continue;
      for (const auto& box : obstacles) {
        if (distance_point_box(x[i], box) < 0.0) x[i] = closest_surface_point(x[i], box).point;
      }
    }
  }

  double residual(const std::vector<Vec3>& x, const std::optional<GripTarget>& grip) const {
    const int n = static_cast<int>(x.size());
    const double ell = params.segment_length();
    double r = 0.0;
    for (int i = 0; i + 1 < n; ++i)
      r = std::max(r, std::abs((x[i + 1] - x[i]).norm() - ell) / ell);
    if (grip && !grip->bead) {
      const auto [seg, f] = locate(grip->s, ell, n);
      const Vec3 at = (1.0 - f) * x[seg] + f * x[seg + 1];
      r = std::max(r, (at - grip->point).norm() / ell);
    }
    for (int i = 0; i < n; ++i) {
      if (inv_mass[i] == 0.0) continue;
      for (const auto& box : obstacles)
        r = std::max(r, std::max(0.0, -distance_point_box(x[i], box)) / ell);
    }
    return r;
  }

  double bead_gap(const std::vector<Vec3>& x, const GripTarget& g) const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
      const Vec3 d = x[i + 1] - x[i];
      const double den = d.squaredNorm();
      const double t = std::clamp(den > 0 ? (g.point - x[i]).dot(d) / den : 0.0, 0.0, 1.0);
      best = std::min(best, (x[i] + t * d - g.point).norm());
    }
    return best;
  }

  // Lengths and pins are projected after the grip so the jaws can never
  // stretch the cable. An out-of-reach bead stalls; detect it and finish
  // with grip-free sweeps so the returned state is inextensible either way.
  void run(std::vector<Vec3>& x, const std::optional<GripTarget>& grip, int max_sweeps,
           double tol_rel) const {
    const int n = static_cast<int>(x.size());
    apply_hard_points(x);
    const bool bead = grip && grip->bead;
    double prev_gap = bead ? bead_gap(x, *grip) : 0.0;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
      project_obstacles(x);
      if (grip) project_grip(x, *grip);
      for (int i = 0; i + 1 < n; ++i) project_pair(x, i, i + 1);
      for (int i = n - 2; i >= 0; --i) project_pair(x, i, i + 1);
      apply_hard_points(x);
      if (residual(x, grip) < tol_rel) break;
      if (bead) {
        const double gap = bead_gap(x, *grip);
        if (std::abs(gap - prev_gap) < 1e-10 && gap > tol_rel) break;  // out of reach
        prev_gap = gap;
      }
    }
    if (grip) {  // grip-free cleanup: inextensibility wins over the jaws
      for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        project_obstacles(x);
        for (int i = 0; i + 1 < n; ++i) project_pair(x, i, i + 1);
        for (int i = n - 2; i >= 0; --i) project_pair(x, i, i + 1);
        apply_hard_points(x);
        if (residual(x, std::nullopt) < tol_rel) break;
      }
    }
  }
};

std::optional<GripTarget> active_grip(const CableConstraints& c) {
  if (c.tight) return GripTarget{c.tight->s, c.tight->grip_point, false};
  if (c.sliding) return GripTarget{c.sliding->s, c.sliding->jaw_point, true};
  return std::nullopt;
}

// A compressed span between two anchors cannot buckle out of a colinear
// state under pure projection (all corrections stay on the line). Seed the
// sag deterministically, downward, sized by the parabola slack estimate.
void seed_buckling(const CableParams& params, CableState& state) {
  const double ell = params.segment_length();
  struct Anchor {
    int index;
    Vec3 p;
  };
  std::vector<Anchor> anchors;
  for (const auto& pin : state.constraints.pins) anchors.push_back({pin.index, pin.position});
  for (const auto& clip : state.constraints.clips) anchors.push_back({clip.index, clip.point});
  if (state.constraints.tight) {
    const int idx = std::clamp(static_cast<int>(std::lround(state.constraints.tight->s / ell)), 0,
                               params.node_count - 1);
    anchors.push_back({idx, state.constraints.tight->grip_point});
  }
  std::sort(anchors.begin(), anchors.end(),
            [](const Anchor& a, const Anchor& b) { return a.index < b.index; });

  for (std::size_t k = 1; k < anchors.size(); ++k) {
    const Anchor& a = anchors[k - 1];
    const Anchor& b = anchors[k];
    if (b.index <= a.index + 1) continue;
    const double arc = (b.index - a.index) * ell;
    const double chord = (b.p - a.p).norm();
    if (chord >= arc - 1e-9) continue;  // taut span, nothing to buckle

    // Skip spans that already deviate from the chord line (warm starts).
    double deviation = 0.0;
    const Vec3 dir = chord > 1e-9 ? Vec3((b.p - a.p) / chord) : Vec3::UnitX();
    for (int j = a.index + 1; j < b.index; ++j) {
      const Vec3 rel = state.nodes[j] - a.p;
      deviation = std::max(deviation, (rel - rel.dot(dir) * dir).norm());
    }
    if (deviation > 0.05 * arc) continue;

    const double span = std::max(chord, 0.1 * arc);
    const double h = std::min(std::sqrt(3.0 * span * (arc - chord) / 8.0), 0.45 * arc);
    for (int j = a.index + 1; j < b.index; ++j) {
      const double t = static_cast<double>(j - a.index) / (b.index - a.index);
      state.nodes[j] = a.p + t * (b.p - a.p);
      state.nodes[j].z() -= h * std::sin(M_PI * t);
    }
  }
}

void check_feasible(const CableParams& params, const CableState& state) {
  const double ell = params.segment_length();
  struct HardPoint {
    double s;
    Vec3 p;
  };
  std::vector<HardPoint> pts;
  for (const auto& pin : state.constraints.pins) pts.push_back({pin.index * ell, pin.position});
  for (const auto& clip : state.constraints.clips) pts.push_back({clip.index * ell, clip.point});
  if (state.constraints.tight)
    pts.push_back({state.constraints.tight->s, state.constraints.tight->grip_point});
  std::sort(pts.begin(), pts.end(), [](const HardPoint& a, const HardPoint& b) { return a.s < b.s; });
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double arc = pts[i].s - pts[i - 1].s;
    const double chord = (pts[i].p - pts[i - 1].p).norm();
    if (chord > arc + 1e-9)
      throw OverstretchError("pinned points farther apart than connecting arc length");
  }
}

}  // namespace

CableState solve_static(const CableParams& params, CableState state,
                        const std::vector<Box3>& obstacles, const SolveOptions& opts,
                        SolveTrace* trace) {
  params.validate();
  const int n = params.node_count;
  if (static_cast<int>(state.nodes.size()) != n) throw ConfigError("node count mismatch");
  check_feasible(params, state);

  const Projector proj(params, obstacles, state.constraints, n);
  const auto grip = active_grip(state.constraints);
  const double tol = opts.length_tol_rel;

  auto& x = state.nodes;
  seed_buckling(params, state);
  proj.run(x, grip, opts.initial_projection_sweeps, tol);

  double energy = cable_energy(params, x);
  if (trace) {
    trace->energies.push_back(energy);
    if (trace->capture_nodes) trace->node_frames.push_back(x);
  }

  std::vector<Vec3> grad(n), trial(n), best(n);
  const double ell = params.segment_length();
  double alpha = ell * ell * ell / (16.0 * params.bending_stiffness);

  auto projected_energy = [&](double step, const std::vector<Vec3>& g, std::vector<Vec3>& out) {
    out = x;
    for (int i = 0; i < n; ++i) {
      if (proj.inv_mass[i] > 0.0) out[i] -= step * g[i];
    }
    proj.run(out, grip, opts.projection_sweeps, tol);
    return cable_energy(params, out);
  };

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    for (auto& g : grad) g.setZero();
    add_gradient(params, x, grad);

    // Backtrack until the projected energy decreases, then expand greedily:
    // stiff bending caps the basic step while slack modes (a rope swinging
    // around its pin) want steps orders of magnitude larger.
    bool accepted = false;
    double best_energy = 0.0;
    while (alpha > 1e-12) {
      best_energy = projected_energy(alpha, grad, trial);
      if (best_energy <= energy + 1e-12) {
        accepted = true;
        best.swap(trial);
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;  // no descent direction left at the smallest step
    while (alpha < 1e6) {
      const double e2 = projected_energy(2.0 * alpha, grad, trial);
      if (e2 >= best_energy - 1e-12) break;
      best_energy = e2;
      best.swap(trial);
      alpha *= 2.0;
    }

    double step_disp = 0.0;
    for (int i = 0; i < n; ++i) step_disp = std::max(step_disp, (best[i] - x[i]).norm());
    x.swap(best);
    energy = best_energy;

    if (trace) {
      trace->energies.push_back(energy);
      if (trace->capture_nodes) trace->node_frames.push_back(x);
    }
    if (step_disp < opts.displacement_tol) break;
  }

  // Final polish so the returned state meets the inextensibility contract.
  proj.run(x, grip, opts.initial_projection_sweeps, tol);
  return state;
}

Vec3 point_at(const CableState& state, double s) {
  if (s < -1e-9) throw std::out_of_range("arc length below zero");
  double remaining = std::max(s, 0.0);
  for (std::size_t i = 0; i + 1 < state.nodes.size(); ++i) {
    const double seg = (state.nodes[i + 1] - state.nodes[i]).norm();
    if (remaining <= seg || i + 2 == state.nodes.size()) {
      if (remaining > seg + 1e-9 && i + 2 == state.nodes.size())
        throw std::out_of_range("arc length beyond cable end");
      const double t = seg > 0.0 ? std::min(remaining / seg, 1.0) : 0.0;
      return state.nodes[i] + t * (state.nodes[i + 1] - state.nodes[i]);
    }
    remaining -= seg;
  }
  return state.nodes.back();
}

double nearest_arc(const CableState& state, const Vec3& p, double* distance) {
  double best = std::numeric_limits<double>::infinity();
  double best_arc = 0.0;
  double arc = 0.0;
  for (std::size_t i = 0; i + 1 < state.nodes.size(); ++i) {
    const Vec3 d = state.nodes[i + 1] - state.nodes[i];
    const double len = d.norm();
    const double t =
        std::clamp(len > 0.0 ? (p - state.nodes[i]).dot(d) / (len * len) : 0.0, 0.0, 1.0);
    const double dist = (state.nodes[i] + t * d - p).norm();
    if (dist < best) {
      best = dist;
      best_arc = arc + t * len;
    }
    arc += len;
  }
  if (distance) *distance = best;
  return best_arc;
}

SlideResult slide_grip(const CableParams& params, CableState& state, const Vec3& jaw_point,
                       const std::vector<Box3>& obstacles, const SolveOptions& opts) {
  if (!state.constraints.sliding) throw GripError("no sliding grip active");
  auto& grip = *state.constraints.sliding;

  grip.jaw_point = jaw_point;
  state = solve_static(params, std::move(state), obstacles, opts);
  auto& g = *state.constraints.sliding;

  double dist = 0.0;
  double s = nearest_arc(state, jaw_point, &dist);
  if (dist > g.capture_radius)
    throw CableLostError("cable escaped the jaw gap");

  s = g.travel_sign > 0 ? std::max(g.s, s) : std::min(g.s, s);
  s = std::clamp(s, g.s_min, g.s_max);
  g.s = s;
  return {s, dist};
}

std::optional<SnagReport> check_snag(const CableParams& params, const CableState& state,
                                     const std::vector<Box3>& obstacles,
                                     const Vec3& pull_direction, const SnagOptions& opts) {
  if (!state.constraints.tight) throw GripError("snag check requires a tight grip");
  return check_snag_at(params, state, obstacles, pull_direction,
                       state.constraints.tight->grip_point, opts);
}

std::optional<SnagReport> check_snag_at(const CableParams& params, const CableState& state,
                                        const std::vector<Box3>& obstacles,
                                        const Vec3& pull_direction, const Vec3& pull_anchor,
                                        const SnagOptions& opts) {
  (void)params;
  const Vec3 grip_point = pull_anchor;
  const Vec3 pull = pull_direction.normalized();
  const int n = static_cast<int>(state.nodes.size());

  std::optional<SnagReport> report;
  for (int i = 1; i + 1 < n; ++i) {
    double clearance = std::numeric_limits<double>::infinity();
    int obstacle_id = -1;
    for (const auto& box : obstacles) {
      const double d = distance_point_box(state.nodes[i], box);
      if (d < clearance) {
        clearance = d;
        obstacle_id = box.id;
      }
    }
    if (clearance >= opts.contact_clearance) continue;

    const Vec3 u = (state.nodes[i] - state.nodes[i - 1]).normalized();
    const Vec3 v = (state.nodes[i + 1] - state.nodes[i]).normalized();
    const double wrap = std::atan2(u.cross(v).norm(), std::clamp(u.dot(v), -1.0, 1.0));
    if (!report || wrap > report->wrap_angle) {
      const Vec3 toward_grip = grip_point - state.nodes[i];
      const bool tensions = toward_grip.norm() > 1e-9 && pull.dot(toward_grip.normalized()) > 0.0;
      report = SnagReport{i, obstacle_id, wrap, wrap > opts.wrap_threshold && tensions};
    }
  }
  return report;
}

}  // namespace cablesim
