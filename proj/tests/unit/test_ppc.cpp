#include <cmath>
#include <numbers>
#include <random>

#include "coopmitl/errors.hpp"
#include "coopmitl/ppc.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace coopmitl;
using testutil::max_abs;

namespace {

std::vector<GraspOffset> rod_grasps() {
  return {{{-0.2, 0, 0}, {}},
          {{0.2, 0, 0}, {0, 0, std::numbers::pi}},
          {{0, 0, 0}, {0, 0, -std::numbers::pi / 2}}};
}

ppc::ControllerGains paper_gains() {
  ppc::ControllerGains g;
  g.shares = {0.5, 0.35, 0.15};
  return g;
}

grid::Partition paper_grid() { return grid::Partition(grid::PartitionConfig{}); }

}  // namespace

TEST_CASE("performance function values") {
  const ppc::PerformanceFunction rho{0.5, 0.01, 1.0, 2.0};
  CHECK(rho.value(2.0) == 0.5);
  CHECK(ppc::performance_value(rho, 7.0) == doctest::Approx(0.49 * std::exp(-5.0) + 0.01).epsilon(1e-15));
  CHECK(rho.value(7.0) == doctest::Approx(0.013302).epsilon(1e-4));
  CHECK(std::abs(rho.value(42.0) - 0.01) <= 1e-12);
  double prev = rho.value(2.0);
  for (double t = 2.1; t < 20.0; t += 0.1) {
    const double v = rho.value(t);
    CHECK(v < prev);
    CHECK(rho.rate(t) < 0.0);
    prev = v;
  }
  const double h = 1e-6;
  CHECK(rho.rate(3.0) == doctest::Approx((rho.value(3.0 + h) - rho.value(3.0 - h)) / (2 * h)).epsilon(1e-7));
}

TEST_CASE("transformed error is odd, increasing and unbounded") {
  CHECK(ppc::transformed_error(0.0) == 0.0);
  CHECK(ppc::transformed_error(0.5) == doctest::Approx(std::log(3.0)));
  double prev = -1e300;
  for (double x = -0.999; x < 1.0; x += 0.001) {
    const double e = ppc::transformed_error(x);
    CHECK(e > prev);
    CHECK(ppc::transformed_error(-x) == doctest::Approx(-e));
    prev = e;
  }
  CHECK(ppc::transformed_error(1.0 - 1e-15) > 30.0);
  CHECK_THROWS_AS(ppc::transformed_error(1.0), Error);
  CHECK_THROWS_AS(ppc::transformed_error(-1.5), Error);
}

TEST_CASE("reference velocity") {
  const Vec6 gains = Vec6::Constant(0.1);
  CHECK(max_abs(ppc::reference_velocity(Vec6::Zero(), gains)) == 0.0);
  const Vec6 v = ppc::reference_velocity(Vec6::Constant(0.5), gains);
  for (int k = 0; k < 6; ++k) CHECK(v(k) == doctest::Approx(-0.109861).epsilon(1e-5));
  const Vec6 xi = (Vec6() << 0.1, -0.2, 0.3, -0.4, 0.5, -0.6).finished();
  CHECK(max_abs(ppc::reference_velocity(-xi, gains) + ppc::reference_velocity(xi, gains)) < 1e-15);
  Vec6 out = Vec6::Zero();
  out(3) = -1.0;
  try {
    (void)ppc::reference_velocity(out, gains);
    FAIL("expected an envelope violation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EnvelopeViolated);
  }
}

TEST_CASE("agent control formula") {
  CHECK(max_abs(ppc::agent_control(Vec6::Zero(), Mat6::Identity(), 1.0)) == 0.0);
  const Vec6 common = ppc::common_wrench(Vec6::Constant(0.5), Vec6::Ones(), 1.0);
  const Vec6 u = ppc::agent_control(common, Mat6::Identity(), 1.0);
  // xi = 0.5: eps = ln 3 and d eps / d xi = 2 / (1 - xi^2) = 8 / 3.
  for (int k = 0; k < 6; ++k) CHECK(u(k) == doctest::Approx(-8.0 / 3.0 * std::log(3.0)).epsilon(1e-12));

  // Block-triangular and general Jacobians give the same answer as a dense solve.
  std::mt19937_64 rng(41);
  for (int n = 0; n < 200; ++n) {
    const Pose o = testutil::random_pose(rng);
    const GraspOffset g{testutil::random_vec3(rng, 0.4), testutil::random_euler(rng, 0.3)};
    const Pose a = kin::object_to_agent_pose(o, g);
    if (std::abs(std::cos(a.orientation.pitch)) < 0.2) continue;
    const Mat6 j = kin::object_agent_jacobian(a, o);
    const Vec6 c = testutil::random_vec6(rng, 3.0);
    const Vec6 dense = -0.3 * j.transpose().fullPivLu().solve(c);
    CHECK(max_abs(ppc::agent_control(c, j, 0.3) - dense) < 1e-10 * (1.0 + dense.norm()));
    const Mat6 general = j + 0.1 * Mat6::Random();
    const Vec6 dense2 = -0.3 * general.transpose().fullPivLu().solve(c);
    CHECK(max_abs(ppc::agent_control(c, general, 0.3) - dense2) < 1e-8 * (1.0 + dense2.norm()));
  }
}

TEST_CASE("controller construction validates gains and shares") {
  auto g = paper_gains();
  CHECK_NOTHROW(ppc::Controller(g, {}, rod_grasps()));
  g.shares = {0.5, 0.5, 0.5};
  CHECK_THROWS_AS(ppc::Controller(g, {}, rod_grasps()), Error);
  g.shares = {0.5, 0.5};
  CHECK_THROWS_AS(ppc::Controller(g, {}, rod_grasps()), Error);
  g = paper_gains();
  g.velocity = 0.0;
  CHECK_THROWS_AS(ppc::Controller(g, {}, rod_grasps()), Error);
  ppc::EnvelopeConfig e;
  e.position_rho_inf = 1.0;
  CHECK_THROWS_AS(ppc::Controller(paper_gains(), e, rod_grasps()), Error);
}

TEST_CASE("initial envelopes follow the recipe") {
  const auto p = paper_grid();
  const auto tr = make_transition_trajectory(p, RegionId{1}, RegionId{2}, 5.0, 0.0);
  ppc::EnvelopeConfig faithful;
  faithful.paper_faithful = true;
  ppc::Controller c(paper_gains(), faithful, rod_grasps());

  Pose pose{Vec3(2.1, 1.95, 2.0), {0.05, 0.0, -0.1}};
  Vec6 vel;
  vel << 0.1, -0.2, 0.0, 0.01, 0.0, 0.02;
  c.init_transition(pose, vel, tr, 0.0);
  for (int k = 0; k < 3; ++k) CHECK(c.position_envelopes()[static_cast<std::size_t>(k)].rho0 == 0.5);
  for (int k = 3; k < 6; ++k) CHECK(c.position_envelopes()[static_cast<std::size_t>(k)].rho0 == 0.5);

  const auto d = c.tick(pose, vel, 0.0);
  for (int k = 0; k < 6; ++k) {
    CHECK(d.rho_v(k) == doctest::Approx(2.0 * std::abs(d.e_v(k)) + 0.1));
    CHECK(std::abs(d.xi_v(k)) < 0.5);
  }

  ppc::Controller conservative(paper_gains(), {}, rod_grasps());
  conservative.init_transition(pose, vel, tr, 0.0);
  CHECK(conservative.position_envelopes()[0].rho0 == doctest::Approx(0.5 / std::sqrt(3.0)));
}

TEST_CASE("start outside the initial envelope is refused") {
  const auto p = paper_grid();
  const auto tr = make_transition_trajectory(p, RegionId{1}, RegionId{2}, 5.0, 3.0);
  ppc::EnvelopeConfig faithful;
  faithful.paper_faithful = true;
  ppc::Controller c(paper_gains(), faithful, rod_grasps());
  const Pose on_edge{Vec3(2.5, 2, 2), {}};
  try {
    c.init_transition(on_edge, Vec6::Zero(), tr, 3.0);
    FAIL("expected a start violation");
  } catch (const ExecutionError& e) {
    CHECK(e.code() == ErrorCode::EnvelopeViolatedAtStart);
    CHECK(e.time() == 3.0);
  }
  CHECK_NOTHROW(c.init_transition(Pose{Vec3(2.49, 2, 2), {}}, Vec6::Zero(), tr, 3.0));
}

TEST_CASE("perfect tracking gives zero input") {
  const auto p = paper_grid();
  const auto tr = make_transition_trajectory(p, RegionId{1}, RegionId{8}, 5.0, 0.0);
  ppc::Controller c(paper_gains(), {}, rod_grasps());
  const auto desired = tr.evaluate(0.0);
  c.init_transition(Pose::from_vector(desired.pose), Vec6::Zero(), tr, 0.0);
  const auto d = c.tick(Pose::from_vector(desired.pose), Vec6::Zero(), 0.0);
  CHECK(max_abs(d.u) == 0.0);
  CHECK(max_abs(d.xi_s) == 0.0);
}

TEST_CASE("load sharing identity holds for every agent") {
  const auto p = paper_grid();
  const auto tr = make_transition_trajectory(p, RegionId{1}, RegionId{2}, 5.0, 0.0);
  ppc::Controller c(paper_gains(), {}, rod_grasps());
  std::mt19937_64 rng(42);
  const Pose start{Vec3(2.05, 2.0, 1.98), {0.02, -0.03, 0.01}};
  const Vec6 v0 = testutil::random_vec6(rng, 0.1);
  c.init_transition(start, v0, tr, 0.0);
  for (int n = 0; n < 100; ++n) {
    const Pose pose{start.position + testutil::random_vec3(rng, 0.05),
                    EulerAngles::from_vector(start.orientation.vector() + testutil::random_vec3(rng, 0.05))};
    const Vec6 vel = v0 + testutil::random_vec6(rng, 0.01);
    const auto d = c.evaluate(pose, vel, 1e-3 * n);
    REQUIRE(d.has_value());
    const auto grasps = rod_grasps();
    const auto wrench = [&](int i) {
      const Pose a = kin::object_to_agent_pose(pose, grasps[static_cast<std::size_t>(i)]);
      const Mat6 j = kin::object_agent_jacobian(a, pose);
      return Vec6(j.transpose() * d->u.segment<6>(6 * i) / c.gains().shares[static_cast<std::size_t>(i)]);
    };
    const Vec6 w1 = wrench(0);
    for (int i = 1; i < 3; ++i) CHECK((wrench(i) - w1).norm() <= 1e-9 * w1.norm());
  }
}

TEST_CASE("evaluate signals leaving the envelope") {
  const auto p = paper_grid();
  const auto tr = make_transition_trajectory(p, RegionId{1}, RegionId{2}, 5.0, 0.0);
  ppc::Controller c(paper_gains(), {}, rod_grasps());
  c.init_transition(Pose{Vec3(2, 2, 2), {}}, Vec6::Zero(), tr, 0.0);
  CHECK(c.evaluate(Pose{Vec3(2, 2, 2), {}}, Vec6::Zero(), 0.5).has_value());
  CHECK_FALSE(c.evaluate(Pose{Vec3(2, 2, 2.4), {}}, Vec6::Zero(), 0.5).has_value());
  CHECK_FALSE(c.evaluate(Pose{Vec3(2, 2, 2), {}}, Vec6::Constant(5.0), 0.5).has_value());
  CHECK_THROWS_AS((void)c.tick(Pose{Vec3(2, 2, 2.4), {}}, Vec6::Zero(), 0.5), ExecutionError);
}

TEST_CASE("controller refuses to run before a transition is bound") {
  ppc::Controller c(paper_gains(), {}, rod_grasps());
  CHECK_FALSE(c.initialized());
  CHECK_THROWS_AS((void)c.evaluate(Pose{}, Vec6::Zero(), 0.0), Error);
}
