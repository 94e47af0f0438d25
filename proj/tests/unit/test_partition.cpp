#include <random>

#include "coopmitl/errors.hpp"
#include "coopmitl/partition.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace coopmitl;
using grid::Partition;
using grid::PartitionConfig;

namespace {

Partition paper_grid() { return Partition(PartitionConfig{}); }

std::vector<int> ids(const std::vector<RegionId>& v) {
  std::vector<int> out;
  for (auto r : v) out.push_back(r.value);
  return out;
}

}  // namespace

TEST_CASE("the 4x4 grid has 16 cells of side 4 numbered serpentine") {
  const Partition p = paper_grid();
  CHECK(p.size() == 16);
  CHECK(p.side() == doctest::Approx(4.0));
  const auto center = [&](int id) { return p.region(RegionId{id}).center; };
  CHECK(testutil::max_abs(center(1) - Vec3(2, 2, 2)) == 0.0);
  CHECK(testutil::max_abs(center(4) - Vec3(14, 2, 2)) == 0.0);
  CHECK(testutil::max_abs(center(5) - Vec3(14, 6, 2)) == 0.0);
  CHECK(testutil::max_abs(center(8) - Vec3(2, 6, 2)) == 0.0);
  CHECK(testutil::max_abs(center(9) - Vec3(2, 10, 2)) == 0.0);
  CHECK(testutil::max_abs(center(16) - Vec3(2, 14, 2)) == 0.0);
  CHECK(testutil::max_abs(center(13) - Vec3(14, 14, 2)) == 0.0);
}

TEST_CASE("region volumes sum to the workspace volume") {
  for (int nx = 1; nx <= 4; ++nx) {
    for (int ny = 1; ny <= 4; ++ny) {
      PartitionConfig cfg;
      cfg.cells = {nx, ny, 1};
      const Partition p(cfg);
      double total = 0.0;
      for (const auto& r : p.regions()) total += r.box.volume();
      CHECK(total == doctest::Approx(p.workspace().volume()).epsilon(1e-12));
    }
  }
}

TEST_CASE("single-cell grid has no neighbors") {
  PartitionConfig cfg;
  cfg.cells = {1, 1, 1};
  const Partition p(cfg);
  CHECK(p.size() == 1);
  CHECK(p.neighbors(RegionId{1}).empty());
}

TEST_CASE("invalid configurations are rejected") {
  PartitionConfig cfg;
  cfg.l_hat = 0.0;
  CHECK_THROWS_AS(Partition{cfg}, Error);
  cfg = {};
  cfg.l0 = -1.0;
  CHECK_THROWS_AS(Partition{cfg}, Error);
  cfg = {};
  cfg.cells = {0, 4, 1};
  CHECK_THROWS_AS(Partition{cfg}, Error);
  cfg = {};
  cfg.first_center = Vec3(2, 2, 3);
  CHECK_THROWS_AS(Partition{cfg}, Error);
  cfg = {};
  cfg.cells = {2, 2, 2};
  CHECK_THROWS_AS(Partition{cfg}, Error);
}

TEST_CASE("region_of uses half-open faces") {
  const Partition p = paper_grid();
  CHECK(p.region_of(Vec3(2, 2, 2)) == RegionId{1});
  // x = 4 is the face between pi1 and pi2; the upper cell owns it.
  CHECK(p.region_of(Vec3(4, 2, 2)) == RegionId{2});
  CHECK(p.region_of(Vec3(std::nextafter(4.0, 0.0), 2, 2)) == RegionId{1});
  CHECK(p.region_of(Vec3(0, 0, 0)) == RegionId{1});
  CHECK_FALSE(p.region_of(Vec3(16, 2, 2)).has_value());
  CHECK_FALSE(p.region_of(Vec3(2, 2, 4)).has_value());
  CHECK_FALSE(p.region_of(Vec3(-1e-12, 2, 2)).has_value());
}

TEST_CASE("region_of agrees with an exhaustive box scan") {
  const Partition p = paper_grid();
  std::mt19937_64 rng(31);
  for (int n = 0; n < 10000; ++n) {
    // Snap half the samples onto the grid lines to exercise the faces.
    Vec3 x(testutil::uniform(rng, -1, 17), testutil::uniform(rng, -1, 17), testutil::uniform(rng, -1, 5));
    if (n % 2 == 0) x.x() = 4.0 * std::round(x.x() / 4.0);
    if (n % 3 == 0) x.y() = 4.0 * std::round(x.y() / 4.0);
    std::optional<RegionId> scan;
    int hits = 0;
    for (const auto& r : p.regions()) {
      bool inside = true;
      for (int k = 0; k < 3; ++k) inside = inside && x(k) >= r.box.lo(k) && x(k) < r.box.hi(k);
      if (inside) {
        scan = r.id;
        ++hits;
      }
    }
    CHECK(hits <= 1);
    CHECK(p.region_of(x) == scan);
  }
}

TEST_CASE("neighbors are the cells whose centers are exactly one side apart") {
  const Partition p = paper_grid();
  CHECK(ids(p.neighbors(RegionId{1})) == std::vector<int>{2, 8});
  for (const auto& a : p.regions()) {
    std::vector<int> expected;
    for (const auto& b : p.regions()) {
      if (std::abs((a.center - b.center).norm() - p.side()) < 1e-9) expected.push_back(b.id.value);
    }
    CHECK(ids(p.neighbors(a.id)) == expected);
    for (const auto& b : p.regions()) CHECK(p.adjacent(a.id, b.id) == p.adjacent(b.id, a.id));
  }
  // Interior cells of a single-layer grid have four neighbors.
  for (int id : {7, 6, 11, 10}) CHECK(p.neighbors(RegionId{id}).size() == 4);
}

TEST_CASE("published run moves only between face-adjacent cells") {
  const Partition p = paper_grid();
  const std::vector<int> run{1, 2, 3, 4, 5, 12, 13, 14, 11, 12, 5};
  for (std::size_t i = 0; i + 1 < run.size(); ++i) {
    CHECK(p.adjacent(RegionId{run[i]}, RegionId{run[i + 1]}));
  }
}

TEST_CASE("closed union of adjacent cells is their bounding box") {
  const Partition p = paper_grid();
  const auto u = p.closed_union(RegionId{1}, RegionId{2});
  CHECK(testutil::max_abs(u.lo - Vec3(0, 0, 0)) == 0.0);
  CHECK(testutil::max_abs(u.hi - Vec3(8, 4, 4)) == 0.0);
  const auto self = p.closed_union(RegionId{3}, RegionId{3});
  CHECK(testutil::max_abs(self.lo - p.region(RegionId{3}).box.lo) == 0.0);
  CHECK_THROWS_AS((void)p.closed_union(RegionId{1}, RegionId{3}), Error);
  try {
    (void)p.closed_union(RegionId{1}, RegionId{7});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotAdjacent);
  }
  // The tube ball around any point of the center segment fits with slack.
  const double reach = p.config().l_hat + p.config().l0;
  for (double s = 0.0; s <= 1.0; s += 0.01) {
    const Vec3 c = (1 - s) * p.region(RegionId{1}).center + s * p.region(RegionId{2}).center;
    CHECK(u.contains_ball(c, reach, 1e-9));
  }
}

TEST_CASE("system_in_region follows the strict distance rule") {
  const Partition p = paper_grid();
  const Vec3 c = p.region(RegionId{1}).center;
  const std::vector<Vec3> rod{c + Vec3(-0.2, 0, 0), c + Vec3(0.2, 0, 0), c};
  CHECK(p.system_in_region(c, rod, RegionId{1}));
  const Vec3 edge = c + Vec3(0.5, 0, 0);
  CHECK_FALSE(p.system_in_region(edge, std::vector<Vec3>{edge}, RegionId{1}));
  // The published initial position is far from the first center.
  const Vec3 start(1.6, 2, 0.44);
  CHECK((start - c).norm() == doctest::Approx(std::sqrt(0.4 * 0.4 + 1.56 * 1.56)).epsilon(1e-12));
  CHECK_FALSE(p.system_in_region(start, std::vector<Vec3>{start}, RegionId{1}));
  // A body point outside the cell fails even with the center in range.
  CHECK_FALSE(p.system_in_region(c, std::vector<Vec3>{c + Vec3(2.5, 0, 0)}, RegionId{1}));
}

TEST_CASE("labeling defaults to the empty set") {
  grid::Labeling l;
  l.add(RegionId{5}, "blue");
  l.add(RegionId{6}, "obs");
  l.add(RegionId{6}, "obs");
  CHECK(l.labels(RegionId{5}) == PropositionSet{"blue"});
  CHECK(l.labels(RegionId{6}).size() == 1);
  CHECK(l.labels(RegionId{1}).empty());
}
