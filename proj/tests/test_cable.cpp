#include <cmath>

#include "cablesim/cable.hpp"
#include "doctest.h"

using namespace cablesim;

namespace {

double max_length_violation(const CableParams& params, const CableState& state) {
  const double ell = params.segment_length();
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < state.nodes.size(); ++i)
    worst = std::max(worst, std::abs((state.nodes[i + 1] - state.nodes[i]).norm() - ell));
  return worst;
}

CableParams default_params() {
  CableParams p;
  p.total_length = 200.0;
  p.node_count = 60;
  p.bending_stiffness = 50.0;
  p.weight_per_length = 0.01;
  return p;
}

}  // namespace

TEST_CASE("taut limit: pins at exactly total length give a straight line") {
  CableParams p = default_params();
  CableState state = CableState::straight_line(p, {0, 0, 0}, {200, 0, 0});
  // mild perturbation so the solver has work to do
  for (std::size_t i = 1; i + 1 < state.nodes.size(); ++i)
    state.nodes[i].z() += std::sin(0.3 * static_cast<double>(i));
  state.constraints.pins = {{0, {0, 0, 0}}, {p.node_count - 1, {200, 0, 0}}};

  const CableState solved = solve_static(p, state, {});
  CHECK(max_length_violation(p, solved) <= 1e-6 * p.segment_length());
  for (const auto& n : solved.nodes) {
    CHECK(std::abs(n.y()) < 1e-5);
    CHECK(std::abs(n.z()) < 1e-5);
  }
}

TEST_CASE("pins beyond total length overstretch") {
  CableParams p = default_params();
  CableState state = CableState::straight_line(p, {0, 0, 0}, {201, 0, 0});
  state.constraints.pins = {{0, {0, 0, 0}}, {p.node_count - 1, {201, 0, 0}}};
  CHECK_THROWS_AS(solve_static(p, state, {}), OverstretchError);
}

TEST_CASE("symmetric pins sag symmetrically") {
  CableParams p = default_params();
  const double span = 160.0;  // 80% of length
  CableState state = CableState::straight_line(p, {0, 0, 0}, {span, 0, 0});
  state.constraints.pins = {{0, {0, 0, 0}}, {p.node_count - 1, {span, 0, 0}}};
  SolveTrace trace;
  const CableState solved = solve_static(p, state, {}, {}, &trace);

  CHECK(max_length_violation(p, solved) <= 1e-6 * p.segment_length());
  double sag = 0.0;
  for (int i = 0; i < p.node_count; ++i) {
    sag = std::min(sag, solved.nodes[i].z());
    const Vec3& a = solved.nodes[i];
    const Vec3& b = solved.nodes[p.node_count - 1 - i];
    CHECK(std::abs(a.z() - b.z()) < 1e-3);
    CHECK(std::abs(a.x() - (span - b.x())) < 1e-3);
  }
  CHECK(sag < -1.0);  // it actually sags

  // energy sequence non-increasing within tolerance
  for (std::size_t i = 1; i < trace.energies.size(); ++i)
    CHECK(trace.energies[i] <= trace.energies[i - 1] + 1e-9);
}

TEST_CASE("one pinned end hangs as a plumb line") {
  CableParams p = default_params();
  CableState state = CableState::straight_line(p, {0, 0, 0}, {200, 0, 0});
  state.constraints.pins = {{0, {0, 0, 0}}};
  SolveOptions opts;
  opts.max_iterations = 20000;
  const CableState solved = solve_static(p, state, {}, opts);
  CHECK(max_length_violation(p, solved) <= 1e-6 * p.segment_length());
  // free end well below the pin and laterally close to it
  const Vec3& end = solved.nodes.back();
  CHECK(end.z() < -0.95 * (p.total_length - 5.0));
  CHECK(end.head<2>().norm() < 0.05 * p.total_length);
}

TEST_CASE("mesh refinement changes the sag by less than 2%") {
  auto max_sag = [](const CableParams& p) {
    const double span = 160.0;
    CableState state = CableState::straight_line(p, {0, 0, 0}, {span, 0, 0});
    state.constraints.pins = {{0, {0, 0, 0}}, {p.node_count - 1, {span, 0, 0}}};
    const CableState solved = solve_static(p, state, {});
    double sag = 0.0;
    for (const auto& n : solved.nodes) sag = std::min(sag, n.z());
    return -sag;
  };
  CableParams coarse = default_params();
  CableParams fine = default_params();
  fine.node_count = 2 * coarse.node_count;
  const double s1 = max_sag(coarse);
  const double s2 = max_sag(fine);
  CHECK(std::abs(s1 - s2) / s1 < 0.02);
}

TEST_CASE("translation equivariance") {
  CableParams p = default_params();
  const Vec3 v(37.0, -11.0, 23.0);
  CableState a = CableState::straight_line(p, {0, 0, 0}, {160, 0, 0});
  a.constraints.pins = {{0, {0, 0, 0}}, {p.node_count - 1, {160, 0, 0}}};
  CableState b = a;
  for (auto& n : b.nodes) n += v;
  for (auto& pin : b.constraints.pins) pin.position += v;

  // Rounding differences branch the line search, so both runs land near the
  // equilibrium rather than on bitwise-identical iterates.
  const CableState sa = solve_static(p, a, {});
  const CableState sb = solve_static(p, b, {});
  for (int i = 0; i < p.node_count; ++i) CHECK((sb.nodes[i] - sa.nodes[i] - v).norm() < 0.5);
}

TEST_CASE("obstacles keep nodes outside") {
  CableParams p = default_params();
  Box3 board;
  board.pose.translation = {80, 0, -52.0};
  board.half_extents = {200, 200, 50};  // top face at z = -2
  CableState state = CableState::straight_line(p, {0, 0, 0}, {160, 0, 0});
  state.constraints.pins = {{0, {0, 0, 0}}, {p.node_count - 1, {160, 0, 0}}};
  const CableState solved = solve_static(p, state, {board});
  for (const auto& n : solved.nodes) CHECK(distance_point_box(n, board) >= -1e-3);
  double sag = 0.0;
  for (const auto& n : solved.nodes) sag = std::min(sag, n.z());
  CHECK(sag == doctest::Approx(-2.0).epsilon(0.01));  // rests on the board
}

TEST_CASE("point_at endpoints and midpoint") {
  CableParams p = default_params();
  CableState state = CableState::straight_line(p, {0, 0, 0}, {200, 0, 0});
  CHECK(point_at(state, 0.0).isApprox(Vec3(0, 0, 0)));
  CHECK(point_at(state, 200.0).isApprox(Vec3(200, 0, 0)));
  CHECK(point_at(state, 100.0).isApprox(Vec3(100, 0, 0)));
  CHECK_THROWS_AS(point_at(state, -1.0), std::out_of_range);
  CHECK_THROWS_AS(point_at(state, 201.0), std::out_of_range);
}

TEST_CASE("sliding grip tracks the nearest point monotonically") {
  CableParams p = default_params();
  p.weight_per_length = 1e-9;  // slack line keeps its shape
  CableState state = CableState::straight_line(p, {0, 0, 0}, {200, 0, 0});
  state.constraints.pins = {{0, {0, 0, 0}}};
  SlidingGrip grip;
  grip.s = 50.0;
  grip.s_min = 0.0;
  grip.s_max = 200.0;
  grip.jaw_point = {50, 0, 0};
  state.constraints.sliding = grip;

  SUBCASE("gripper over the midpoint") {
    const SlideResult r = slide_grip(p, state, {100, 0, 1.0}, {});
    CHECK(r.s == doctest::Approx(100.0).epsilon(1e-3));
  }
  SUBCASE("advance by 30 mm along the cable") {
    const SlideResult r = slide_grip(p, state, {80, 0, 0.5}, {});
    CHECK(r.s == doctest::Approx(80.0).epsilon(1e-2));
    // monotone: moving backwards does not reduce s
    const SlideResult r2 = slide_grip(p, state, {60, 0, 0.5}, {});
    CHECK(r2.s >= r.s - 1e-9);
  }
  SUBCASE("beyond the free end clamps, far away loses the cable") {
    const SlideResult r = slide_grip(p, state, {202, 0, 0}, {});
    CHECK(r.s == doctest::Approx(200.0).epsilon(1e-3));
    CHECK_THROWS_AS(slide_grip(p, state, {260, 0, 0}, {}), CableLostError);
  }
}

TEST_CASE("snag detection") {
  CableParams p = default_params();

  SUBCASE("straight free cable, no obstacles") {
    CableState state = CableState::straight_line(p, {0, 0, 0}, {200, 0, 0});
    state.constraints.tight = TightGrip{100.0, {100, 0, 0}};
    CHECK_FALSE(check_snag(p, state, {}, {1, 0, 0}).has_value());
  }

  SUBCASE("90 degree wrap around a corner blocks the pull") {
    // corner of the box at (0, 0); polyline wraps it at ~90 degrees
    Box3 box;
    box.pose.translation = {-10, 10, 0};
    box.half_extents = {10, 10, 10};
    CableState state;
    const int n = 41;
    for (int i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / (n - 1);
      if (t < 0.5) {
        state.nodes.push_back({40.3 - 80.0 * t, -0.3, 0.0});  // toward the corner
      } else {
        state.nodes.push_back({0.3, -0.3 + 80.0 * (t - 0.5), 0.0});  // up past it
      }
    }
    state.constraints.tight = TightGrip{0.0, state.nodes.front()};
    const auto report = check_snag(p, state, {box}, {1, 0, 0});
    REQUIRE(report.has_value());
    CHECK(report->blocked);
    CHECK(report->wrap_angle > M_PI / 3);
    CHECK(report->wrap_angle <= M_PI + 1e-12);
  }

  SUBCASE("contact with a shallow 10 degree bend does not block") {
    Box3 box;
    box.pose.translation = {0, -10.2, 0};
    box.half_extents = {50, 10, 10};  // top face just under the line
    CableState state;
    const int n = 41;
    const double bend = 10.0 * M_PI / 180.0;
    for (int i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / (n - 1);
      const double x = 80.0 * (t - 0.5);
      const double y = x > 0 ? x * std::tan(bend) : 0.0;
      state.nodes.push_back({x, y, 0.0});
    }
    state.constraints.tight = TightGrip{0.0, state.nodes.front()};
    const auto report = check_snag(p, state, {box}, {-1, 0, 0});
    REQUIRE(report.has_value());
    CHECK_FALSE(report->blocked);
  }
}
