#pragma once

#include "coopmitl/kinematics.hpp"
#include "coopmitl/partition.hpp"

namespace coopmitl {

struct DesiredSample {
  Vec6 pose;          // x_d = [p_d; eta_d]
  Vec6 velocity;      // xdot_d
  Vec6 acceleration;  // xddot_d
};

/// Desired pose for one transition: the straight segment between two region
/// centers under a quintic time scaling with zero end velocity and
/// acceleration, and a constant orientation. Holds the end point after t0 + duration.
class TransitionTrajectory {
 public:
  TransitionTrajectory(Vec3 start, Vec3 end, EulerAngles orientation, double t0,
                       double duration);

  [[nodiscard]] DesiredSample evaluate(double t) const;

  [[nodiscard]] const Vec3& start() const { return start_; }
  [[nodiscard]] const Vec3& end() const { return end_; }
  [[nodiscard]] double t0() const { return t0_; }
  [[nodiscard]] double duration() const { return duration_; }
  [[nodiscard]] const EulerAngles& orientation() const { return orientation_; }

  /// Peak speed of the quintic profile, 15 |end - start| / (8 duration).
  [[nodiscard]] double peak_speed() const;

 private:
  Vec3 start_;
  Vec3 end_;
  EulerAngles orientation_;
  double t0_;
  double duration_;
};

/// Trajectory between the centers of two face-adjacent regions.
/// Throws NotAdjacent otherwise; use self_loop_trajectory for from == to.
TransitionTrajectory make_transition_trajectory(const grid::Partition& partition,
                                                RegionId from, RegionId to,
                                                double duration, double t0,
                                                const EulerAngles& orientation = {});

/// Constant hold at the center of one region.
TransitionTrajectory self_loop_trajectory(const grid::Partition& partition, RegionId id,
                                          double duration, double t0,
                                          const EulerAngles& orientation = {});

}  // namespace coopmitl
