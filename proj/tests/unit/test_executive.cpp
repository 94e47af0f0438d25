#include <numbers>
#include <sstream>

#include "coopmitl/errors.hpp"
#include "coopmitl/executive.hpp"
#include "coopmitl/trace_io.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace coopmitl;

namespace {

Scenario mission() { return load_scenario(COOPMITL_SOURCE_DIR "/scenarios/paperV.toml"); }

// pi1 -> pi2, then hold pi2 for one loop period: 10 s of simulated time.
plan::Plan short_plan() {
  plan::Plan p;
  p.steps = {{RegionId{1}, 0.0}, {RegionId{2}, 5.0}};
  p.loop_start = 1;
  return p;
}

const exec::ExecutionTrace& short_trace() {
  static const exec::ExecutionTrace trace = exec::execute_plan(mission(), short_plan());
  return trace;
}

}  // namespace

TEST_CASE("expand_plan lists prefix edges then loop periods") {
  const Scenario s = mission();
  const auto wts = s.build_wts();
  plan::Plan p;
  p.steps = {{RegionId{1}, 0}, {RegionId{2}, 5}, {RegionId{3}, 10}};
  p.loop_start = 2;
  const auto edges = exec::expand_plan(p, wts, 2);
  REQUIRE(edges.size() == 4);
  CHECK(edges[0].from == RegionId{1});
  CHECK(edges[0].to == RegionId{2});
  CHECK(edges[2].from == RegionId{3});
  CHECK(edges[2].to == RegionId{3});
  CHECK(edges[3].t0 == 15.0);
  for (const auto& e : edges) CHECK(e.duration == 5.0);
  CHECK(exec::expand_plan(short_plan(), wts, 0).size() == 1);
  plan::Plan empty;
  CHECK_THROWS_AS(exec::expand_plan(empty, wts, 1), Error);
}

TEST_CASE("body points are the center and every grasp point") {
  const Scenario s = mission();
  const Pose o{Vec3(2, 2, 2), {0, 0, std::numbers::pi / 2}};
  const auto pts = exec::body_points(o, s.grasps());
  REQUIRE(pts.size() == 4);
  CHECK(testutil::max_abs(pts[0] - o.position) == 0.0);
  CHECK(testutil::max_abs(pts[1] - Vec3(2, 1.8, 2)) < 1e-15);
  CHECK(testutil::max_abs(pts[2] - Vec3(2, 2.2, 2)) < 1e-15);
  CHECK(testutil::max_abs(pts[3] - o.position) == 0.0);
}

TEST_CASE("one transition and a hold execute and verify") {
  const Scenario s = mission();
  const auto& trace = short_trace();
  REQUIRE(trace.records.size() == 10001);
  CHECK(trace.records.front().t == 0.0);
  CHECK(trace.records.back().t == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(trace.records[4999].transition == 0);
  CHECK(trace.records[5000].transition == 1);
  CHECK(trace.records[5000].from == RegionId{2});
  CHECK(trace.agents == 3);
  CHECK(trace.integrator.accepted > 0);

  const Vec3 end = trace.records.back().pose.head<3>();
  CHECK((end - Vec3(6, 2, 2)).norm() < s.partition.l0);

  const auto report = exec::verify_trace(trace, short_plan(), s, mitl::parse("G[0,inf) !obs"));
  CHECK(report.violation_count == 0);
  CHECK(report.complete);
  CHECK(report.formula_satisfied);
  CHECK(report.satisfied);
  CHECK(report.load_sharing_error <= 1e-9);
  REQUIRE(report.transitions.size() == 2);
  for (const auto& t : report.transitions) {
    CHECK(t.reached);
    CHECK(t.position_margin > 0.0);
    CHECK(t.velocity_margin > 0.0);
    CHECK(t.tube_margin > 0.0);
    CHECK(t.containment_margin >= -1e-9);
  }
  REQUIRE(report.observed_run.size() == 3);
  CHECK(report.observed_run[1].region == RegionId{2});
  CHECK(report.observed_run[2].time == 10.0);

  // The same run cannot reach green, so a reach task fails on formula alone.
  const auto reach = exec::verify_trace(trace, short_plan(), s, mitl::parse("F[0,50] green"));
  CHECK(reach.violation_count == 0);
  CHECK_FALSE(reach.formula_satisfied);
  CHECK_FALSE(reach.satisfied);
}

TEST_CASE("execution is deterministic to the bit") {
  const auto again = exec::execute_plan(mission(), short_plan());
  std::ostringstream a;
  std::ostringstream b;
  io::write_trace(a, short_trace());
  io::write_trace(b, again);
  CHECK(a.str() == b.str());
}

TEST_CASE("verification flags a body point pushed out of the cell pair") {
  const Scenario s = mission();
  exec::ExecutionTrace trace = short_trace();
  trace.records[1234].pose(2) += 2.5;  // lifts the object through the top face
  const auto report = exec::verify_trace(trace, short_plan(), s, mitl::parse("true"));
  CHECK_FALSE(report.satisfied);
  bool containment = false;
  for (const auto& v : report.violations) {
    containment = containment || (v.kind == "containment" && std::abs(v.t - 1.234) < 1e-9);
  }
  CHECK(containment);
}

TEST_CASE("a truncated trace is incomplete and cannot satisfy the task") {
  const Scenario s = mission();
  exec::ExecutionTrace trace = short_trace();
  trace.records.resize(7000);
  const auto report = exec::verify_trace(trace, short_plan(), s, mitl::parse("G[0,inf) !obs"));
  CHECK_FALSE(report.complete);
  CHECK_FALSE(report.satisfied);
  CHECK(report.violation_count == 0);

  exec::ExecutionTrace shuffled = short_trace();
  std::swap(shuffled.records[10], shuffled.records[11]);
  const auto bad = exec::verify_trace(shuffled, short_plan(), s, mitl::parse("true"));
  CHECK(bad.violation_count > 0);
  CHECK_FALSE(bad.satisfied);

  exec::ExecutionTrace relabeled = short_trace();
  for (auto& r : relabeled.records) {
    if (r.transition == 1) r.to = RegionId{3};
  }
  CHECK_FALSE(exec::verify_trace(relabeled, short_plan(), s, mitl::parse("true")).satisfied);
}

TEST_CASE("execution refuses bad starts") {
  Scenario s = mission();
  s.initial_state.pose.position = Vec3(1.6, 2, 0.44);
  try {
    (void)exec::execute_plan(s, short_plan());
    FAIL("start outside the first cell was accepted");
  } catch (const ExecutionError& e) {
    CHECK(e.code() == ErrorCode::RegionAssertionFailed);
    CHECK(e.time() == 0.0);
  }

  plan::Plan elsewhere = short_plan();
  elsewhere.steps[0].region = RegionId{2};
  CHECK_THROWS_AS((void)exec::execute_plan(mission(), elsewhere), Error);

  Scenario odd_dt = mission();
  odd_dt.dt = 0.003;
  CHECK_THROWS_AS((void)exec::execute_plan(odd_dt, short_plan()), Error);
}

TEST_CASE("partial trace survives an execution failure") {
  Scenario s = mission();
  // Near the envelope edge with a large outward speed: the object leaves the
  // position envelope soon after the start.
  s.initial_state.pose.position = Vec3(2.25, 2, 2);
  s.initial_state.velocity << 3.0, 0, 0, 0, 0, 0;
  exec::ExecutionTrace trace;
  try {
    exec::execute_plan(s, short_plan(), trace);
    FAIL("expected an execution error");
  } catch (const ExecutionError& e) {
    CHECK((e.code() == ErrorCode::EnvelopeViolated || e.code() == ErrorCode::EnvelopeViolatedAtStart));
    CHECK(e.time() < 5.0);
  }
  CHECK(trace.records.size() < 5000);
}
