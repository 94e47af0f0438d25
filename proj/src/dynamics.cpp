#include "coopmitl/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "coopmitl/errors.hpp"

namespace coopmitl::dyn {

Vec6 Sinusoid::operator()(double t) const {
  Vec6 out;
  for (int k = 0; k < 6; ++k) {
    out(k) = amplitude(k) * std::sin(frequency(k) * t + phase(k));
  }
  return out;
}

namespace {

ObjectMatrices object_matrices(const kin::ObjectFrame& frame, const ObjectParams& params) {
  const Mat3& j = frame.jacobian;
  const Mat3& r = frame.rotation;
  const Mat3 inertia_world = r * params.inertia * r.transpose();

  ObjectMatrices m;
  m.inertia.setZero();
  m.inertia.topLeftCorner<3, 3>() = params.mass * Mat3::Identity();
  m.inertia.bottomRightCorner<3, 3>() = j.transpose() * inertia_world * j;
  // Symmetrize against round-off so downstream Cholesky sees an exactly
  // symmetric matrix.
  m.inertia = 0.5 * (m.inertia + m.inertia.transpose()).eval();

  m.coriolis.setZero();
  m.coriolis.bottomRightCorner<3, 3>() =
      j.transpose() *
      (inertia_world * frame.jacobian_dot + kin::skew(frame.omega) * inertia_world * j);

  m.gravity.setZero();
  m.gravity.z() = params.mass * params.gravity;
  return m;
}

}  // namespace

ObjectMatrices object_matrices(const Pose& pose, const Vec6& velocity,
                               const ObjectParams& params) {
  const Vec3 eta_dot = velocity.tail<3>();
  return object_matrices(kin::ObjectFrame::at(pose, eta_dot), params);
}

Vec6 agent_uncertainty(const AgentParams& agent, const Pose& agent_pose,
                       const Vec6& agent_velocity, double t) {
  const Vec6 x = agent_pose.vector();
  const Sinusoid& f = agent.uncertainty;
  Vec6 out;
  for (int k = 0; k < 6; ++k) {
    out(k) = f.amplitude(k) * std::sin(f.frequency(k) * t + f.phase(k) + x(k)) *
             std::cos(agent_velocity(k));
  }
  return out;
}

namespace {

bool is_symmetric_psd(const Mat6& m) {
  if (!m.allFinite() || (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12) return false;
  Eigen::SelfAdjointEigenSolver<Mat6> eig(m);
  return eig.eigenvalues().minCoeff() >= -1e-12;
}

}  // namespace

CoupledModel::CoupledModel(ObjectParams object, std::vector<AgentParams> agents)
    : object_(std::move(object)), agents_(std::move(agents)) {
  if (!(object_.mass > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "object mass must be positive");
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(object_.inertia);
  if ((object_.inertia - object_.inertia.transpose()).cwiseAbs().maxCoeff() > 1e-12 ||
      eig.eigenvalues().minCoeff() <= 0.0) {
    throw Error(ErrorCode::InvalidConfig, "object inertia must be symmetric positive definite");
  }
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    if (!is_symmetric_psd(agents_[i].inertia)) {
      std::ostringstream os;
      os << "agent " << i + 1 << " inertia must be symmetric positive semi-definite";
      throw Error(ErrorCode::InvalidConfig, os.str());
    }
    grasps_.push_back(agents_[i].grasp);
  }
}

CoupledMatrices CoupledModel::coupled_matrices(const CoupledState& state) const {
  const Vec3 eta_dot = state.velocity.tail<3>();
  const kin::ObjectFrame frame = kin::ObjectFrame::at(state.pose, eta_dot);
  const ObjectMatrices obj = object_matrices(frame, object_);

  CoupledMatrices out;
  out.inertia = obj.inertia;
  out.coriolis = obj.coriolis;
  out.bias = obj.gravity;
  out.disturbance = object_.disturbance(state.time);
  out.grasp.resize(6 * static_cast<Eigen::Index>(agents_.size()), 6);

  for (std::size_t i = 0; i < agents_.size(); ++i) {
    const AgentParams& agent = agents_[i];
    const kin::GraspTerms g = kin::grasp_terms(state.pose, frame, eta_dot, agent.grasp);
    const Mat6& j = g.jacobian;
    const Vec6 agent_velocity = j * state.velocity;
    const Eigen::Matrix<double, 6, 6> jt_m = j.transpose() * agent.inertia;

    // Agent Coriolis terms are zero in this truth model (constant M_i).
    out.inertia.noalias() += jt_m * j;
    out.coriolis.noalias() += jt_m * g.jacobian_dot;
    out.bias.noalias() +=
        j.transpose() *
        (agent.gravity + agent_uncertainty(agent, g.agent, agent_velocity, state.time));
    out.disturbance.noalias() += j.transpose() * agent.disturbance(state.time);
    out.grasp.block<6, 6>(6 * static_cast<Eigen::Index>(i), 0) = j;
  }
  out.inertia = 0.5 * (out.inertia + out.inertia.transpose()).eval();
  return out;
}

Vec6 CoupledModel::acceleration(const CoupledState& state, const VecX& u) const {
  const CoupledMatrices m = coupled_matrices(state);
  Vec6 rhs = -m.coriolis * state.velocity - m.bias - m.disturbance;
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    const auto row = 6 * static_cast<Eigen::Index>(i);
    rhs.noalias() += m.grasp.block<6, 6>(row, 0).transpose() * u.segment<6>(row);
  }
  const Eigen::LLT<Mat6> llt(m.inertia);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::NonFiniteState, "coupled inertia lost positive definiteness");
  }
  return llt.solve(rhs);
}

namespace {

using Derivative = Eigen::Matrix<double, 12, 1>;

Derivative pack(const CoupledState& s) {
  Derivative x;
  x << s.pose.vector(), s.velocity;
  return x;
}

CoupledState unpack(const Derivative& x, double t) {
  CoupledState s;
  s.pose = Pose::from_vector(x.head<6>());
  s.velocity = x.tail<6>();
  s.time = t;
  return s;
}

CoupledState finish(const Derivative& x, double t) {
  CoupledState s = unpack(x, t);
  s.pose.orientation = s.pose.orientation.wrapped();
  return s;
}

}  // namespace

CoupledState CoupledModel::step(const CoupledState& state, const VecX& u,
                                double dt) const {
  if (!(dt > 0.0 && dt <= 1e-2)) {
    throw Error(ErrorCode::InvalidConfig, "integration step must lie in (0, 1e-2]");
  }
  const auto f = [&](const Derivative& x, double t) {
    const CoupledState s = unpack(x, t);
    Derivative d;
    d << s.velocity, acceleration(s, u);
    return d;
  };
  const Derivative x0 = pack(state);
  const double t0 = state.time;
  const Derivative k1 = f(x0, t0);
  const Derivative k2 = f(x0 + 0.5 * dt * k1, t0 + 0.5 * dt);
  const Derivative k3 = f(x0 + 0.5 * dt * k2, t0 + 0.5 * dt);
  const Derivative k4 = f(x0 + dt * k3, t0 + dt);
  const Derivative x1 = x0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!x1.allFinite()) {
    throw ExecutionError(ErrorCode::NonFiniteState, t0 + dt, "integration diverged");
  }
  return finish(x1, t0 + dt);
}

VecX CoupledModel::interaction_wrenches(const CoupledState& state, const VecX& u,
                                        const Vec6& acceleration) const {
  const Vec3 eta_dot = state.velocity.tail<3>();
  const kin::ObjectFrame frame = kin::ObjectFrame::at(state.pose, eta_dot);
  VecX lambda(6 * agents_.size());
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    const AgentParams& agent = agents_[i];
    const auto row = 6 * static_cast<Eigen::Index>(i);
    const kin::GraspTerms g = kin::grasp_terms(state.pose, frame, eta_dot, agent.grasp);
    const Vec6 agent_velocity = g.jacobian * state.velocity;
    const Vec6 agent_acceleration =
        g.jacobian * acceleration + g.jacobian_dot * state.velocity;
    lambda.segment<6>(row) =
        u.segment<6>(row) - agent.inertia * agent_acceleration - agent.gravity -
        agent_uncertainty(agent, g.agent, agent_velocity, state.time) -
        agent.disturbance(state.time);
  }
  return lambda;
}

Vec6 CoupledModel::object_residual(const CoupledState& state, const VecX& lambda,
                                   const Vec6& acceleration) const {
  const ObjectMatrices obj = object_matrices(state.pose, state.velocity, object_);
  Vec6 wrench = Vec6::Zero();
  if (!agents_.empty()) {
    wrench = kin::grasp_matrix(state.pose, grasps_).transpose() * lambda;
  }
  return wrench - (obj.inertia * acceleration + obj.coriolis * state.velocity +
                   obj.gravity + object_.disturbance(state.time));
}

namespace {

using OdeState = std::array<double, 12>;

// Thrown from inside a stepper stage when the control law has no value.
struct OutsideDomain {};

OdeState to_ode(const CoupledState& s) {
  OdeState x;
  const Vec6 pose = s.pose.vector();
  for (int k = 0; k < 6; ++k) {
    x[static_cast<std::size_t>(k)] = pose(k);
    x[static_cast<std::size_t>(k + 6)] = s.velocity(k);
  }
  return x;
}

CoupledState from_ode(const OdeState& x, double t) {
  Derivative d;
  for (int k = 0; k < 12; ++k) d(k) = x[static_cast<std::size_t>(k)];
  return unpack(d, t);
}

}  // namespace

ClosedLoopIntegrator::ClosedLoopIntegrator(const CoupledModel& model,
                                           AdaptiveOptions options)
    : model_(&model), options_(options) {}

CoupledState ClosedLoopIntegrator::advance(const CoupledState& state,
                                           const ControlLaw& law, double interval) {
  const auto system = [&](const OdeState& x, OdeState& dxdt, double t) {
    const CoupledState s = from_ode(x, t);
    const std::optional<VecX> u = law(s);
    if (!u || !u->allFinite()) throw OutsideDomain{};
    const Vec6 a = model_->acceleration(s, *u);
    if (!a.allFinite()) throw OutsideDomain{};
    for (int k = 0; k < 6; ++k) {
      dxdt[static_cast<std::size_t>(k)] = s.velocity(k);
      dxdt[static_cast<std::size_t>(k + 6)] = a(k);
    }
  };

  const double t_end = state.time + interval;
  double t = state.time;
  OdeState x = to_ode(state);
  OdeState dxdt;
  try {
    system(x, dxdt, t);
  } catch (const OutsideDomain&) {
    throw ExecutionError(ErrorCode::EnvelopeViolated, t,
                         "state outside the control domain at step start");
  }

  double h = hint_ > 0.0 ? std::min(hint_, interval) : interval;
  OdeState out;
  OdeState dxdt_out;
  OdeState err;
  while (true) {
    const double remaining = t_end - t;
    if (remaining <= 1e-15 * std::max(1.0, std::abs(t_end))) break;
    const bool last = h >= remaining;
    const double step = last ? remaining : h;

    bool accepted = false;
    bool domain_failure = false;
    double error_ratio = 0.0;
    try {
      // The FSAL derivative at the end point doubles as the check that the
      // accepted state is still inside the control domain.
      stepper_.do_step(system, x, dxdt, t, out, dxdt_out, step, err);
      for (std::size_t k = 0; k < 12; ++k) {
        const double scale = options_.absolute_tolerance +
                             options_.relative_tolerance *
                                 std::max(std::abs(x[k]), std::abs(out[k]));
        error_ratio = std::max(error_ratio, std::abs(err[k]) / scale);
      }
      accepted = std::isfinite(error_ratio) && error_ratio <= 1.0;
    } catch (const OutsideDomain&) {
      domain_failure = true;
    }

    if (accepted) {
      ++stats_.accepted;
      stats_.smallest_step =
          stats_.smallest_step == 0.0 ? step : std::min(stats_.smallest_step, step);
      x = out;
      for (std::size_t k = 3; k < 6; ++k) x[k] = wrap_angle(x[k]);
      dxdt = dxdt_out;
      t = last ? t_end : t + step;
      if (!last) {
        const double grow =
            error_ratio > 0.0 ? std::clamp(0.9 * std::pow(error_ratio, -0.2), 0.2, 5.0) : 5.0;
        h = std::min(step * grow, interval);
        hint_ = h;
      }
    } else {
      ++stats_.rejected;
      const double shrink =
          !domain_failure && std::isfinite(error_ratio)
              ? std::clamp(0.9 * std::pow(error_ratio, -0.2), 0.1, 0.5)
              : 0.5;
      h = step * shrink;
      if (h < options_.min_step) {
        if (domain_failure) {
          throw ExecutionError(ErrorCode::EnvelopeViolated, t,
                               "closed-loop state cannot be kept inside the "
                               "control domain at the minimum step");
        }
        throw ExecutionError(ErrorCode::NonFiniteState, t,
                             "adaptive step fell below the minimum step");
      }
      hint_ = h;
    }
  }
  CoupledState result = from_ode(x, t_end);
  result.pose.orientation = result.pose.orientation.wrapped();
  return result;
}

}  // namespace coopmitl::dyn
