#include "coopmitl/ppc.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "coopmitl/errors.hpp"

namespace coopmitl::ppc {

double PerformanceFunction::value(double t) const {
  return (rho0 - rho_inf) * std::exp(-decay * (t - t0)) + rho_inf;
}

double PerformanceFunction::rate(double t) const {
  return -decay * (rho0 - rho_inf) * std::exp(-decay * (t - t0));
}

double performance_value(const PerformanceFunction& rho, double t) { return rho.value(t); }

double EnvelopeConfig::position_rho0() const {
  return paper_faithful ? l0 : l0 / std::sqrt(3.0);
}

double transformed_error(double xi) {
  if (!(std::abs(xi) < 1.0)) {
    throw Error(ErrorCode::EnvelopeViolated, "normalized error outside (-1, 1)");
  }
  return 2.0 * std::atanh(xi);
}

Vec6 reference_velocity(const Vec6& xi_s, const Vec6& gains) {
  Vec6 out;
  for (int k = 0; k < 6; ++k) out(k) = -gains(k) * transformed_error(xi_s(k));
  return out;
}

Vec6 common_wrench(const Vec6& xi_v, const Vec6& rho_v, double velocity_gain) {
  Vec6 out;
  for (int k = 0; k < 6; ++k) {
    const double xi = xi_v(k);
    const double eps = transformed_error(xi);
    out(k) = velocity_gain * (2.0 / (1.0 - xi * xi)) * eps / rho_v(k);
  }
  return out;
}

Vec6 agent_control(const Vec6& common, const Mat6& object_agent_jacobian, double share) {
  const Mat6& j = object_agent_jacobian;
  const bool block_triangular = j.bottomLeftCorner<3, 3>().isZero(0.0) &&
                                j.topLeftCorner<3, 3>().isIdentity(0.0);
  if (!block_triangular) return -share * j.transpose().partialPivLu().solve(common);
  // J^T = [[I, 0], [A^T, B^T]] solves by forward substitution.
  const Mat3 b = j.bottomRightCorner<3, 3>();
  Vec6 x;
  x.head<3>() = common.head<3>();
  x.tail<3>() = b.transpose().inverse() *
                (common.tail<3>() - j.topRightCorner<3, 3>().transpose() * common.head<3>());
  return -share * x;
}

Controller::Controller(ControllerGains gains, EnvelopeConfig envelopes,
                       std::vector<GraspOffset> grasps)
    : gains_(std::move(gains)), envelopes_(envelopes), grasps_(std::move(grasps)) {
  if (grasps_.empty() || gains_.shares.size() != grasps_.size()) {
    throw Error(ErrorCode::InvalidConfig, "one load share per agent is required");
  }
  for (double c : gains_.shares) {
    if (!(c >= 0.0 && c <= 1.0)) {
      throw Error(ErrorCode::InvalidConfig, "load shares must lie in [0, 1]");
    }
  }
  const double total = std::accumulate(gains_.shares.begin(), gains_.shares.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidConfig, "load shares must sum to one");
  }
  if (!(gains_.position.minCoeff() > 0.0) || !(gains_.velocity > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "controller gains must be positive");
  }
  const double rho0 = envelopes_.position_rho0();
  if (!(rho0 > envelopes_.position_rho_inf && envelopes_.position_rho_inf > 0.0 &&
        envelopes_.orientation_rho0 > envelopes_.orientation_rho_inf &&
        envelopes_.orientation_rho_inf > 0.0 && envelopes_.velocity_rho_inf > 0.0 &&
        envelopes_.velocity_rho0_offset > envelopes_.velocity_rho_inf &&
        envelopes_.velocity_rho0_gain >= 1.0 && envelopes_.position_decay > 0.0 &&
        envelopes_.orientation_decay > 0.0 && envelopes_.velocity_decay > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "invalid performance function parameters");
  }
}

Vec6 Controller::pose_error(const Pose& pose, const Vec6& desired) const {
  Vec6 e;
  e.head<3>() = pose.position - desired.head<3>();
  for (int k = 0; k < 3; ++k) {
    e(3 + k) = wrap_angle(pose.orientation.vector()(k) - desired(3 + k));
  }
  return e;
}

void Controller::init_transition(const Pose& pose, const Vec6& velocity,
                                 const TransitionTrajectory& trajectory, double t0) {
  trajectory_ = trajectory;
  const Vec6 e_s = pose_error(pose, trajectory.evaluate(t0).pose);
  for (int k = 0; k < 6; ++k) {
    auto& rho = rho_s_[static_cast<std::size_t>(k)];
    if (k < 3) {
      rho = {envelopes_.position_rho0(), envelopes_.position_rho_inf,
             envelopes_.position_decay, t0};
    } else {
      rho = {envelopes_.orientation_rho0, envelopes_.orientation_rho_inf,
             envelopes_.orientation_decay, t0};
    }
    if (!(std::abs(e_s(k)) < rho.rho0)) {
      std::ostringstream os;
      os << "pose error on axis " << k + 1 << " (" << e_s(k)
         << ") not inside the initial envelope " << rho.rho0;
      throw ExecutionError(ErrorCode::EnvelopeViolatedAtStart, t0, os.str());
    }
  }
  Vec6 xi_s;
  for (int k = 0; k < 6; ++k) xi_s(k) = e_s(k) / rho_s_[static_cast<std::size_t>(k)].rho0;
  const Vec6 e_v = velocity - reference_velocity(xi_s, gains_.position);
  for (int k = 0; k < 6; ++k) {
    const double rho0 =
        envelopes_.velocity_rho0_gain * std::abs(e_v(k)) + envelopes_.velocity_rho0_offset;
    rho_v_[static_cast<std::size_t>(k)] = {rho0, envelopes_.velocity_rho_inf,
                                           envelopes_.velocity_decay, t0};
  }
}

std::optional<Diagnostics> Controller::evaluate(const Pose& pose, const Vec6& velocity,
                                                double t) const {
  if (!trajectory_) {
    throw Error(ErrorCode::InvalidConfig, "controller used before init_transition");
  }
  Diagnostics d;
  d.desired_pose = trajectory_->evaluate(t).pose;
  d.e_s = pose_error(pose, d.desired_pose);
  for (int k = 0; k < 6; ++k) {
    d.rho_s(k) = rho_s_[static_cast<std::size_t>(k)].value(t);
    d.xi_s(k) = d.e_s(k) / d.rho_s(k);
    if (!(std::abs(d.xi_s(k)) < 1.0)) return std::nullopt;
  }
  d.reference_velocity = reference_velocity(d.xi_s, gains_.position);
  d.e_v = velocity - d.reference_velocity;
  for (int k = 0; k < 6; ++k) {
    d.rho_v(k) = rho_v_[static_cast<std::size_t>(k)].value(t);
    d.xi_v(k) = d.e_v(k) / d.rho_v(k);
    if (!(std::abs(d.xi_v(k)) < 1.0)) return std::nullopt;
  }
  const Vec6 common = common_wrench(d.xi_v, d.rho_v, gains_.velocity);
  d.u.resize(6 * static_cast<Eigen::Index>(grasps_.size()));
  for (std::size_t i = 0; i < grasps_.size(); ++i) {
    const Pose agent = kin::object_to_agent_pose(pose, grasps_[i]);
    const Mat6 j = kin::object_agent_jacobian(agent, pose);
    d.u.segment<6>(6 * static_cast<Eigen::Index>(i)) =
        agent_control(common, j, gains_.shares[i]);
  }
  return d;
}

Diagnostics Controller::tick(const Pose& pose, const Vec6& velocity, double t) const {
  auto d = evaluate(pose, velocity, t);
  if (!d) {
    throw ExecutionError(ErrorCode::EnvelopeViolated, t,
                         "tracking error left its performance envelope");
  }
  return *d;
}

}  // namespace coopmitl::ppc
