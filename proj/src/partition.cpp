#include "coopmitl/partition.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "coopmitl/errors.hpp"

namespace coopmitl {

std::ostream& operator<<(std::ostream& os, RegionId id) {
  return os << "pi" << id.value;
}

namespace grid {

bool Box::contains(const Vec3& p) const {
  for (int k = 0; k < 3; ++k) {
    if (!(p(k) >= lo(k) && p(k) < hi(k))) return false;
  }
  return true;
}

bool Box::contains_closed(const Vec3& p, double tol) const {
  for (int k = 0; k < 3; ++k) {
    if (p(k) < lo(k) - tol || p(k) > hi(k) + tol) return false;
  }
  return true;
}

bool Box::contains_ball(const Vec3& c, double r, double tol) const {
  for (int k = 0; k < 3; ++k) {
    if (c(k) - r < lo(k) - tol || c(k) + r > hi(k) + tol) return false;
  }
  return true;
}

Partition::Partition(const PartitionConfig& cfg) : cfg_(cfg) {
  if (!(cfg.l_hat > 0.0) || !(cfg.l0 > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "partition requires L_hat > 0 and l0 > 0");
  }
  if (cfg.cells[0] < 1 || cfg.cells[1] < 1 || cfg.cells[2] < 1) {
    throw Error(ErrorCode::InvalidConfig, "partition extents must be positive");
  }
  if (cfg.cells[2] != 1) {
    throw Error(ErrorCode::InvalidConfig, "only single-layer partitions are supported");
  }
  const double half = cfg.l_hat + cfg.l0;
  if (std::abs(cfg.first_center.z() - half) > 1e-12 * std::max(1.0, half)) {
    throw Error(ErrorCode::InvalidConfig,
                "region centers must sit at height L_hat + l0");
  }
  side_ = 2.0 * half;

  const int nx = cfg.cells[0];
  const int ny = cfg.cells[1];
  regions_.reserve(static_cast<std::size_t>(nx * ny));
  for (int row = 0; row < ny; ++row) {
    for (int step = 0; step < nx; ++step) {
      const int col = row % 2 == 0 ? step : nx - 1 - step;
      Region r;
      r.id = RegionId{static_cast<int>(regions_.size()) + 1};
      r.center = cfg.first_center + side_ * Vec3(col, row, 0.0);
      r.box = Box{r.center.array() - half, r.center.array() + half};
      regions_.push_back(r);
      grid_pos_.push_back({col, row});
    }
  }
  workspace_.lo = cfg.first_center.array() - half;
  workspace_.hi = workspace_.lo + side_ * Vec3(nx, ny, 1.0);
}

const Region& Partition::region(RegionId id) const {
  if (!valid(id)) {
    std::ostringstream os;
    os << "unknown region " << id;
    throw Error(ErrorCode::InvalidConfig, os.str());
  }
  return regions_[static_cast<std::size_t>(id.value - 1)];
}

RegionId Partition::id_at(int col, int row) const {
  const int nx = cfg_.cells[0];
  const int step = row % 2 == 0 ? col : nx - 1 - col;
  return RegionId{row * nx + step + 1};
}

std::optional<RegionId> Partition::region_of(const Vec3& p) const {
  if (!workspace_.contains(p)) return std::nullopt;
  const Vec3 rel = (p - workspace_.lo) / side_;
  int col = static_cast<int>(std::floor(rel.x()));
  int row = static_cast<int>(std::floor(rel.y()));
  // Floor of the scaled offset can land one cell off next to a face; settle
  // it against the exact half-open boxes.
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      const int c = col + dc;
      const int r = row + dr;
      if (c < 0 || r < 0 || c >= cfg_.cells[0] || r >= cfg_.cells[1]) continue;
      const RegionId id = id_at(c, r);
      if (region(id).box.contains(p)) return id;
    }
  }
  return std::nullopt;
}

std::vector<RegionId> Partition::neighbors(RegionId id) const {
  const auto [col, row] = grid_pos_.at(static_cast<std::size_t>(region(id).id.value - 1));
  std::vector<RegionId> out;
  const std::array<std::array<int, 2>, 4> moves{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
  for (const auto& [dc, dr] : moves) {
    const int c = col + dc;
    const int r = row + dr;
    if (c < 0 || r < 0 || c >= cfg_.cells[0] || r >= cfg_.cells[1]) continue;
    out.push_back(id_at(c, r));
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool Partition::adjacent(RegionId a, RegionId b) const {
  const auto n = neighbors(a);
  return std::find(n.begin(), n.end(), b) != n.end();
}

Box Partition::closed_union(RegionId a, RegionId b) const {
  if (a != b && !adjacent(a, b)) {
    std::ostringstream os;
    os << a << " and " << b << " are not adjacent";
    throw Error(ErrorCode::NotAdjacent, os.str());
  }
  const Box& ba = region(a).box;
  const Box& bb = region(b).box;
  return Box{ba.lo.cwiseMin(bb.lo), ba.hi.cwiseMax(bb.hi)};
}

bool Partition::system_in_region(const Vec3& object_position,
                                 std::span<const Vec3> body_points,
                                 RegionId id) const {
  const Region& r = region(id);
  for (const Vec3& p : body_points) {
    if (!r.box.contains(p)) return false;
  }
  return (object_position - r.center).norm() < cfg_.l0;
}

void Labeling::add(RegionId id, const std::string& proposition) {
  labels_[id].insert(proposition);
}

const PropositionSet& Labeling::labels(RegionId id) const {
  static const PropositionSet empty;
  const auto it = labels_.find(id);
  return it == labels_.end() ? empty : it->second;
}

}  // namespace grid
}  // namespace coopmitl
