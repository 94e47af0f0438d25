#include "coopmitl/kinematics.hpp"

#include <cmath>
#include <numbers>

#include "coopmitl/errors.hpp"

namespace coopmitl {

double wrap_angle(double angle) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::remainder(angle, two_pi);
  if (r <= -std::numbers::pi) r += two_pi;
  return r;
}

namespace kin {

Mat3 skew(const Vec3& a) {
  Mat3 s;
  s << 0.0, -a.z(), a.y(),
       a.z(), 0.0, -a.x(),
       -a.y(), a.x(), 0.0;
  return s;
}

Mat3 euler_to_rotation(const EulerAngles& eta) {
  const double cr = std::cos(eta.roll), sr = std::sin(eta.roll);
  const double cp = std::cos(eta.pitch), sp = std::sin(eta.pitch);
  const double cy = std::cos(eta.yaw), sy = std::sin(eta.yaw);
  Mat3 r;
  r << cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr,
       sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr,
       -sp, cp * sr, cp * cr;
  return r;
}

Mat3 analytic_jacobian(const EulerAngles& eta) {
  const double cp = std::cos(eta.pitch), sp = std::sin(eta.pitch);
  if (std::abs(cp) < kSingularityTolerance) {
    throw Error(ErrorCode::SingularOrientation,
                "Euler pitch at representation singularity (|cos(pitch)| < 1e-6)");
  }
  const double cy = std::cos(eta.yaw), sy = std::sin(eta.yaw);
  // Columns: roll rate -> Rz Ry e_x, pitch rate -> Rz e_y, yaw rate -> e_z.
  Mat3 j;
  j << cy * cp, -sy, 0.0,
       sy * cp, cy, 0.0,
       -sp, 0.0, 1.0;
  return j;
}

Mat3 analytic_jacobian_derivative(const EulerAngles& eta, const Vec3& eta_dot) {
  const double cp = std::cos(eta.pitch), sp = std::sin(eta.pitch);
  const double cy = std::cos(eta.yaw), sy = std::sin(eta.yaw);
  const double pitch_rate = eta_dot.y();
  const double yaw_rate = eta_dot.z();
  Mat3 d;
  d << -cy * sp * pitch_rate - sy * cp * yaw_rate, -cy * yaw_rate, 0.0,
       -sy * sp * pitch_rate + cy * cp * yaw_rate, -sy * yaw_rate, 0.0,
       -cp * pitch_rate, 0.0, 0.0;
  return d;
}

Mat3 analytic_jacobian_inverse(const EulerAngles& eta) {
  const double cp = std::cos(eta.pitch), sp = std::sin(eta.pitch);
  if (std::abs(cp) < kSingularityTolerance) {
    throw Error(ErrorCode::SingularOrientation,
                "Euler pitch at representation singularity (|cos(pitch)| < 1e-6)");
  }
  const double cy = std::cos(eta.yaw), sy = std::sin(eta.yaw);
  const double tp = sp / cp;
  Mat3 inv;
  inv << cy / cp, sy / cp, 0.0,
         -sy, cy, 0.0,
         cy * tp, sy * tp, 1.0;
  return inv;
}

Pose object_to_agent_pose(const Pose& object, const GraspOffset& grasp) {
  Pose agent;
  agent.position =
      object.position + euler_to_rotation(object.orientation) * grasp.offset;
  agent.orientation =
      EulerAngles::from_vector(object.orientation.vector() +
                               grasp.angular_offset.vector())
          .wrapped();
  return agent;
}

Mat6 object_agent_jacobian(const Pose& agent, const Pose& object) {
  const Mat3 j_object = analytic_jacobian(object.orientation);
  const Mat3 j_agent_inv = analytic_jacobian_inverse(agent.orientation);
  const Vec3 agent_to_object = object.position - agent.position;

  Mat6 j = Mat6::Zero();
  j.topLeftCorner<3, 3>().setIdentity();
  j.topRightCorner<3, 3>() = skew(agent_to_object) * j_object;
  j.bottomRightCorner<3, 3>() = j_agent_inv * j_object;
  return j;
}

ObjectFrame ObjectFrame::at(const Pose& object, const Vec3& eta_dot) {
  ObjectFrame f;
  f.rotation = euler_to_rotation(object.orientation);
  f.jacobian = analytic_jacobian(object.orientation);
  f.jacobian_dot = analytic_jacobian_derivative(object.orientation, eta_dot);
  f.omega = f.jacobian * eta_dot;
  return f;
}

GraspTerms grasp_terms(const Pose& object, const ObjectFrame& frame, const Vec3& eta_dot,
                       const GraspOffset& grasp) {
  GraspTerms out;
  const Vec3 grasp_world = frame.rotation * grasp.offset;
  out.agent.position = object.position + grasp_world;
  out.agent.orientation =
      EulerAngles::from_vector(object.orientation.vector() + grasp.angular_offset.vector())
          .wrapped();

  const Mat3 j_agent_inv = analytic_jacobian_inverse(out.agent.orientation);
  // eta_E = eta_O + alpha, so the end-effector Euler rates equal the object's.
  const Mat3 j_agent_dot = analytic_jacobian_derivative(out.agent.orientation, eta_dot);
  const Mat3 s = skew(-grasp_world);
  const Mat3 s_dot = skew(-frame.omega.cross(grasp_world));
  const Mat3 b = j_agent_inv * frame.jacobian;

  out.jacobian.setZero();
  out.jacobian.topLeftCorner<3, 3>().setIdentity();
  out.jacobian.topRightCorner<3, 3>() = s * frame.jacobian;
  out.jacobian.bottomRightCorner<3, 3>() = b;

  out.jacobian_dot.setZero();
  out.jacobian_dot.topRightCorner<3, 3>() = s_dot * frame.jacobian + s * frame.jacobian_dot;
  out.jacobian_dot.bottomRightCorner<3, 3>() =
      j_agent_inv * (frame.jacobian_dot - j_agent_dot * b);
  return out;
}

Mat6 object_agent_jacobian_derivative(const Pose& object, const Vec6& velocity,
                                      const GraspOffset& grasp) {
  const Vec3 eta_dot = velocity.tail<3>();
  return grasp_terms(object, ObjectFrame::at(object, eta_dot), eta_dot, grasp).jacobian_dot;
}

MatX grasp_matrix(const Pose& object, std::span<const GraspOffset> grasps) {
  MatX g(6 * grasps.size(), 6);
  for (std::size_t i = 0; i < grasps.size(); ++i) {
    const Pose agent = object_to_agent_pose(object, grasps[i]);
    g.block<6, 6>(6 * static_cast<Eigen::Index>(i), 0) =
        object_agent_jacobian(agent, object);
  }
  return g;
}

MatX grasp_matrix_derivative(const Pose& object, const Vec6& velocity,
                             std::span<const GraspOffset> grasps) {
  MatX d(6 * grasps.size(), 6);
  for (std::size_t i = 0; i < grasps.size(); ++i) {
    d.block<6, 6>(6 * static_cast<Eigen::Index>(i), 0) =
        object_agent_jacobian_derivative(object, velocity, grasps[i]);
  }
  return d;
}

}  // namespace kin
}  // namespace coopmitl
