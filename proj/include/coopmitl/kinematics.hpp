#pragma once

#include <Eigen/Dense>

#include <span>

namespace coopmitl {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

/// Wraps an angle into (-pi, pi].
double wrap_angle(double angle);

/// ZYX Euler angles (rad). The rotation is Rz(yaw) * Ry(pitch) * Rx(roll).
struct EulerAngles {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;

  static EulerAngles from_vector(const Vec3& v) { return {v.x(), v.y(), v.z()}; }
  [[nodiscard]] Vec3 vector() const { return {roll, pitch, yaw}; }
  [[nodiscard]] EulerAngles wrapped() const {
    return {wrap_angle(roll), wrap_angle(pitch), wrap_angle(yaw)};
  }
};

/// Position (m) plus orientation; the 6-vector form is [p; eta].
struct Pose {
  Vec3 position = Vec3::Zero();
  EulerAngles orientation;

  static Pose from_vector(const Vec6& x) {
    return {x.head<3>(), EulerAngles::from_vector(x.tail<3>())};
  }
  [[nodiscard]] Vec6 vector() const {
    Vec6 x;
    x << position, orientation.vector();
    return x;
  }
};

/// Rigid grasp of one agent: grasp point offset from the object center in
/// the object frame, and the constant Euler-angle offset of the end-effector.
struct GraspOffset {
  Vec3 offset = Vec3::Zero();
  EulerAngles angular_offset;
};

namespace kin {

/// |cos(pitch)| below this is treated as the ZYX representation singularity.
inline constexpr double kSingularityTolerance = 1e-6;

Mat3 skew(const Vec3& a);

Mat3 euler_to_rotation(const EulerAngles& eta);

/// Maps Euler-angle rates to the world-frame angular velocity,
/// omega = J(eta) * eta_dot. Throws SingularOrientation near |pitch| = pi/2.
Mat3 analytic_jacobian(const EulerAngles& eta);

/// Closed-form inverse of analytic_jacobian. Throws SingularOrientation.
Mat3 analytic_jacobian_inverse(const EulerAngles& eta);

/// Time derivative of analytic_jacobian along eta(t) with rates eta_dot.
Mat3 analytic_jacobian_derivative(const EulerAngles& eta, const Vec3& eta_dot);

/// Coupled kinematics x_E = f_O(x_O): p_E = p_O + R_O r, eta_E = eta_O + alpha.
Pose object_to_agent_pose(const Pose& object, const GraspOffset& grasp);

/// 6x6 Jacobian mapping the object pose rate to the end-effector pose rate:
/// [[I, S(p_O - p_E) J_O], [0, J_E^-1 J_O]].
Mat6 object_agent_jacobian(const Pose& agent, const Pose& object);

/// Time derivative of object_agent_jacobian(f_O(x_O), x_O) along the object
/// motion with velocity v (position rates and Euler rates).
Mat6 object_agent_jacobian_derivative(const Pose& object, const Vec6& velocity,
                                      const GraspOffset& grasp);

/// Object-frame quantities shared by every grasp at one state.
struct ObjectFrame {
  Mat3 rotation;
  Mat3 jacobian;
  Mat3 jacobian_dot;
  Vec3 omega;

  /// Throws SingularOrientation.
  static ObjectFrame at(const Pose& object, const Vec3& eta_dot);
};

/// Agent pose, J_Oi and its time derivative computed together.
struct GraspTerms {
  Pose agent;
  Mat6 jacobian;
  Mat6 jacobian_dot;
};

GraspTerms grasp_terms(const Pose& object, const ObjectFrame& frame, const Vec3& eta_dot,
                       const GraspOffset& grasp);

/// Grasp matrix G = [J_O1; ...; J_ON] (6N x 6).
MatX grasp_matrix(const Pose& object, std::span<const GraspOffset> grasps);

/// dG/dt, stacked like grasp_matrix.
MatX grasp_matrix_derivative(const Pose& object, const Vec6& velocity,
                             std::span<const GraspOffset> grasps);

}  // namespace kin
}  // namespace coopmitl
