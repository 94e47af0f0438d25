#pragma once

// Truth model of the coupled object-agents system. Nothing in this header is
// visible to the controller (ppc.hpp does not include it).

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include <boost/numeric/odeint/stepper/runge_kutta_dopri5.hpp>

#include "coopmitl/kinematics.hpp"

namespace coopmitl::dyn {

inline constexpr double kGravity = 9.81;

/// Componentwise a_k * sin(omega_k * t + phase_k).
struct Sinusoid {
  Vec6 amplitude = Vec6::Zero();
  Vec6 frequency = Vec6::Zero();  // rad/s
  Vec6 phase = Vec6::Zero();      // rad

  [[nodiscard]] Vec6 operator()(double t) const;
};

struct ObjectParams {
  double mass = 1.0;                          // kg
  Mat3 inertia = 0.1 * Mat3::Identity();      // body frame, kg m^2
  double gravity = kGravity;                  // m/s^2
  Sinusoid disturbance;                       // w_O(t)
};

struct AgentParams {
  GraspOffset grasp;
  Mat6 inertia = Mat6::Identity();   // constant task-space inertia M_i
  Vec6 gravity = Vec6::Zero();       // task-space gravity vector g_i
  /// Model uncertainty f_i(x_E, xdot_E, t) = a * sin(w t + phase + x_E) * cos(xdot_E).
  Sinusoid uncertainty;
  Sinusoid disturbance;              // w_i(t)
};

struct CoupledState {
  Pose pose;                       // x_O
  Vec6 velocity = Vec6::Zero();    // position rates and Euler-angle rates
  double time = 0.0;
};

struct ObjectMatrices {
  Mat6 inertia;   // M_O
  Mat6 coriolis;  // C_O
  Vec6 gravity;   // g_O
};

struct CoupledMatrices {
  Mat6 inertia;      // M~
  Mat6 coriolis;     // C~
  Vec6 bias;         // h~
  Vec6 disturbance;  // w~
  MatX grasp;        // G
};

/// Newton-Euler object dynamics written in Euler-rate coordinates:
/// M_O = blockdiag(m I, J^T I_w J), C_O = blockdiag(0, J^T (I_w Jdot + S(w) I_w J)).
ObjectMatrices object_matrices(const Pose& pose, const Vec6& velocity,
                               const ObjectParams& params);

/// f_i evaluated at an end-effector state.
Vec6 agent_uncertainty(const AgentParams& agent, const Pose& agent_pose,
                       const Vec6& agent_velocity, double t);

class CoupledModel {
 public:
  CoupledModel(ObjectParams object, std::vector<AgentParams> agents);

  [[nodiscard]] const ObjectParams& object() const { return object_; }
  [[nodiscard]] const std::vector<AgentParams>& agents() const { return agents_; }
  [[nodiscard]] std::size_t agent_count() const { return agents_.size(); }
  [[nodiscard]] const std::vector<GraspOffset>& grasps() const { return grasps_; }

  [[nodiscard]] CoupledMatrices coupled_matrices(const CoupledState& state) const;

  /// xddot_O = M~^-1 (G^T u - C~ xdot_O - h~ - w~).
  [[nodiscard]] Vec6 acceleration(const CoupledState& state, const VecX& u) const;

  /// One fixed-step RK4 update with the input held constant over the step.
  [[nodiscard]] CoupledState step(const CoupledState& state, const VecX& u,
                                  double dt) const;

  /// Per-agent interaction wrenches lambda_i for a consistent (state, u,
  /// acceleration) triple.
  [[nodiscard]] VecX interaction_wrenches(const CoupledState& state, const VecX& u,
                                          const Vec6& acceleration) const;

  /// G^T lambda - (M_O a + C_O v + g_O + w_O): zero when the object's own
  /// equation of motion closes.
  [[nodiscard]] Vec6 object_residual(const CoupledState& state, const VecX& lambda,
                                     const Vec6& acceleration) const;

 private:
  ObjectParams object_;
  std::vector<AgentParams> agents_;
  std::vector<GraspOffset> grasps_;
};

/// Control law evaluated inside the integrator; nullopt means the state lies
/// outside the controller's domain.
using ControlLaw = std::function<std::optional<VecX>(const CoupledState&)>;

struct AdaptiveOptions {
  double relative_tolerance = 1e-9;
  double absolute_tolerance = 1e-11;
  double min_step = 1e-10;
};

struct AdaptiveStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  double smallest_step = 0.0;
};

/// Embedded Dormand-Prince 5(4) over [t, t + interval] with the control
/// re-evaluated at every stage. Trial steps whose stages or end point leave
/// the control domain are rejected and halved. Throws EnvelopeViolated or
/// NonFiniteState when the step would have to drop below min_step.
class ClosedLoopIntegrator {
 public:
  ClosedLoopIntegrator(const CoupledModel& model, AdaptiveOptions options = {});

  [[nodiscard]] CoupledState advance(const CoupledState& state, const ControlLaw& law,
                                     double interval);

  [[nodiscard]] const AdaptiveStats& stats() const { return stats_; }
  void reset_step_hint() { hint_ = 0.0; }

 private:
  const CoupledModel* model_;
  AdaptiveOptions options_;
  AdaptiveStats stats_;
  double hint_ = 0.0;
  boost::numeric::odeint::runge_kutta_dopri5<std::array<double, 12>> stepper_;
};

}  // namespace coopmitl::dyn
