#pragma once

// Model-free prescribed-performance controller. Reads only the object state,
// time, grasp geometry and gains; it has no access to dynamic parameters.

#include <array>
#include <optional>
#include <vector>

#include "coopmitl/kinematics.hpp"
#include "coopmitl/trajectory.hpp"

namespace coopmitl::ppc {

/// rho(t) = (rho0 - rho_inf) exp(-decay (t - t0)) + rho_inf.
struct PerformanceFunction {
  double rho0 = 1.0;
  double rho_inf = 0.01;
  double decay = 1.0;  // 1/s
  double t0 = 0.0;     // s

  [[nodiscard]] double value(double t) const;
  [[nodiscard]] double rate(double t) const;
};

/// Same as PerformanceFunction::value.
double performance_value(const PerformanceFunction& rho, double t);

/// Envelope recipe applied at every transition start.
struct EnvelopeConfig {
  double l0 = 0.5;              // tube radius (m)
  bool paper_faithful = false;  // position rho0 = l0 instead of l0 / sqrt(3)
  double position_rho_inf = 0.01;
  double position_decay = 1.0;
  double orientation_rho0 = 0.5;  // rad, must exceed the initial orientation error
  double orientation_rho_inf = 0.01;
  double orientation_decay = 1.0;
  // rho0_v = gain * |e_v(t0)| + offset
  double velocity_rho0_gain = 2.0;
  double velocity_rho0_offset = 0.1;
  double velocity_rho_inf = 0.01;
  double velocity_decay = 1.0;

  [[nodiscard]] double position_rho0() const;
};

struct ControllerGains {
  Vec6 position = Vec6::Constant(0.1);  // g_s per axis
  double velocity = 2.5;                // g_v
  std::vector<double> shares;           // c_i, summing to one
};

/// eps(xi) = ln((1 + xi) / (1 - xi)); requires |xi| < 1.
double transformed_error(double xi);

/// xdot*_d = -g_s * eps(xi_s). Throws EnvelopeViolated if any |xi_s| >= 1.
Vec6 reference_velocity(const Vec6& xi_s, const Vec6& gains);

/// Object-space command shared by all agents: g_v P_v^-1 R_v(xi_v) eps(xi_v).
/// Throws EnvelopeViolated if any |xi_v| >= 1.
Vec6 common_wrench(const Vec6& xi_v, const Vec6& rho_v, double velocity_gain);

/// u_i = -c_i J_Oi^-T * common.
Vec6 agent_control(const Vec6& common, const Mat6& object_agent_jacobian, double share);

/// Every intermediate of one controller evaluation.
struct Diagnostics {
  Vec6 desired_pose;
  Vec6 e_s, rho_s, xi_s;
  Vec6 reference_velocity;
  Vec6 e_v, rho_v, xi_v;
  VecX u;  // stacked u_1..u_N
};

class Controller {
 public:
  Controller(ControllerGains gains, EnvelopeConfig envelopes, std::vector<GraspOffset> grasps);

  /// Binds a transition and builds fresh envelopes from the state at t0.
  /// Throws EnvelopeViolatedAtStart if the state is not strictly inside them.
  void init_transition(const Pose& pose, const Vec6& velocity,
                       const TransitionTrajectory& trajectory, double t0);

  /// Controller output, or nullopt when some |xi| >= 1 (outside the domain).
  [[nodiscard]] std::optional<Diagnostics> evaluate(const Pose& pose, const Vec6& velocity,
                                                    double t) const;

  /// As evaluate, but throws EnvelopeViolated instead of returning nullopt.
  [[nodiscard]] Diagnostics tick(const Pose& pose, const Vec6& velocity, double t) const;

  [[nodiscard]] bool initialized() const { return trajectory_.has_value(); }
  [[nodiscard]] const std::array<PerformanceFunction, 6>& position_envelopes() const {
    return rho_s_;
  }
  [[nodiscard]] const std::array<PerformanceFunction, 6>& velocity_envelopes() const {
    return rho_v_;
  }
  [[nodiscard]] const ControllerGains& gains() const { return gains_; }
  [[nodiscard]] const EnvelopeConfig& envelopes() const { return envelopes_; }

 private:
  [[nodiscard]] Vec6 pose_error(const Pose& pose, const Vec6& desired) const;

  ControllerGains gains_;
  EnvelopeConfig envelopes_;
  std::vector<GraspOffset> grasps_;
  std::optional<TransitionTrajectory> trajectory_;
  std::array<PerformanceFunction, 6> rho_s_{};
  std::array<PerformanceFunction, 6> rho_v_{};
};

}  // namespace coopmitl::ppc
