#pragma once

#include <array>
#include <compare>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "coopmitl/kinematics.hpp"

namespace coopmitl {

/// 1-based region index (pi_1 ... pi_R).
struct RegionId {
  int value = 0;
  auto operator<=>(const RegionId&) const = default;
};

std::ostream& operator<<(std::ostream& os, RegionId id);

using PropositionSet = std::set<std::string>;

namespace grid {

struct PartitionConfig {
  double l_hat = 1.5;                 // bound on system extent from the object center (m)
  double l0 = 0.5;                    // tracking tube radius (m)
  std::array<int, 3> cells{4, 4, 1};  // cells along x, y, z
  Vec3 first_center{2.0, 2.0, 2.0};   // center of pi_1 (m)
};

/// Axis-aligned box; membership is half-open [lo, hi) per axis.
struct Box {
  Vec3 lo;
  Vec3 hi;

  [[nodiscard]] bool contains(const Vec3& p) const;
  /// Closed-box membership with slack.
  [[nodiscard]] bool contains_closed(const Vec3& p, double tol) const;
  /// Closed ball B(c, r) inside the closed box, with slack.
  [[nodiscard]] bool contains_ball(const Vec3& c, double r, double tol) const;
  [[nodiscard]] double volume() const { return (hi - lo).prod(); }
};

struct Region {
  RegionId id;
  Vec3 center;
  Box box;
};

/// Uniform single-layer grid of cubic cells with side D = 2 L^ + 2 l0,
/// numbered serpentine over x-y: row 1 runs +x, row 2 runs -x, and so on.
class Partition {
 public:
  explicit Partition(const PartitionConfig& cfg);

  [[nodiscard]] const PartitionConfig& config() const { return cfg_; }
  [[nodiscard]] double side() const { return side_; }
  [[nodiscard]] std::size_t size() const { return regions_.size(); }
  [[nodiscard]] bool valid(RegionId id) const {
    return id.value >= 1 && static_cast<std::size_t>(id.value) <= regions_.size();
  }
  [[nodiscard]] const Region& region(RegionId id) const;
  [[nodiscard]] std::span<const Region> regions() const { return regions_; }
  [[nodiscard]] Box workspace() const { return workspace_; }

  [[nodiscard]] std::optional<RegionId> region_of(const Vec3& p) const;

  /// Face-adjacent regions (centers exactly D apart), ascending.
  [[nodiscard]] std::vector<RegionId> neighbors(RegionId id) const;
  [[nodiscard]] bool adjacent(RegionId a, RegionId b) const;

  /// Closure of pi_a U pi_b for a == b or face-adjacent a, b (a box in both cases).
  [[nodiscard]] Box closed_union(RegionId a, RegionId b) const;

  /// Definition of "the coupled system is in region j": every body point lies
  /// in the (half-open) cell and the object center is strictly closer than
  /// l0 to the cell center.
  [[nodiscard]] bool system_in_region(const Vec3& object_position,
                                      std::span<const Vec3> body_points,
                                      RegionId id) const;

 private:
  [[nodiscard]] RegionId id_at(int col, int row) const;

  PartitionConfig cfg_;
  double side_;
  std::vector<Region> regions_;
  std::vector<std::array<int, 2>> grid_pos_;  // (col, row) per region
  Box workspace_;
};

/// L : regions -> 2^AP. Regions without an entry carry the empty set.
class Labeling {
 public:
  Labeling() = default;
  void add(RegionId id, const std::string& proposition);
  [[nodiscard]] const PropositionSet& labels(RegionId id) const;
  [[nodiscard]] const std::map<RegionId, PropositionSet>& entries() const { return labels_; }

 private:
  std::map<RegionId, PropositionSet> labels_;
};

}  // namespace grid
}  // namespace coopmitl
