#include "coopmitl/trajectory.hpp"

#include <algorithm>
#include <sstream>

#include "coopmitl/errors.hpp"

namespace coopmitl {

TransitionTrajectory::TransitionTrajectory(Vec3 start, Vec3 end, EulerAngles orientation,
                                           double t0, double duration)
    : start_(std::move(start)),
      end_(std::move(end)),
      orientation_(orientation),
      t0_(t0),
      duration_(duration) {
  if (!(duration > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "transition duration must be positive");
  }
}

DesiredSample TransitionTrajectory::evaluate(double t) const {
  const double tau = std::clamp((t - t0_) / duration_, 0.0, 1.0);
  const double tau2 = tau * tau;
  const double tau3 = tau2 * tau;
  // s = 10 tau^3 - 15 tau^4 + 6 tau^5 and its first two derivatives in t.
  const double s = tau3 * (10.0 + tau * (-15.0 + 6.0 * tau));
  double ds = 30.0 * tau2 * (1.0 - tau) * (1.0 - tau) / duration_;
  double dds = 60.0 * tau * (1.0 - tau) * (1.0 - 2.0 * tau) / (duration_ * duration_);
  if (tau <= 0.0 || tau >= 1.0) {
    ds = 0.0;
    dds = 0.0;
  }
  const Vec3 delta = end_ - start_;

  DesiredSample out;
  out.pose << start_ + s * delta, orientation_.vector();
  out.velocity << ds * delta, Vec3::Zero();
  out.acceleration << dds * delta, Vec3::Zero();
  return out;
}

double TransitionTrajectory::peak_speed() const {
  return 15.0 * (end_ - start_).norm() / (8.0 * duration_);
}

TransitionTrajectory make_transition_trajectory(const grid::Partition& partition,
                                                RegionId from, RegionId to,
                                                double duration, double t0,
                                                const EulerAngles& orientation) {
  if (!partition.adjacent(from, to)) {
    std::ostringstream os;
    os << "no transition between non-adjacent regions " << from << " and " << to;
    throw Error(ErrorCode::NotAdjacent, os.str());
  }
  return TransitionTrajectory(partition.region(from).center, partition.region(to).center,
                              orientation, t0, duration);
}

TransitionTrajectory self_loop_trajectory(const grid::Partition& partition, RegionId id,
                                          double duration, double t0,
                                          const EulerAngles& orientation) {
  const Vec3& c = partition.region(id).center;
  return TransitionTrajectory(c, c, orientation, t0, duration);
}

}  // namespace coopmitl
