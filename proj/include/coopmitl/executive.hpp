#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coopmitl/dynamics.hpp"
#include "coopmitl/mitl.hpp"
#include "coopmitl/planner.hpp"
#include "coopmitl/scenario.hpp"

namespace coopmitl::exec {

/// One logged sample. Controller columns come from the envelope of the
/// transition the sample belongs to.
struct TraceRecord {
  double t = 0.0;
  Vec6 pose = Vec6::Zero();          // x_O
  Vec6 velocity = Vec6::Zero();      // xdot_O
  Vec6 desired_pose = Vec6::Zero();  // x_d
  Vec6 e_s = Vec6::Zero();
  Vec6 rho_s = Vec6::Zero();
  Vec6 e_v = Vec6::Zero();
  Vec6 rho_v = Vec6::Zero();
  VecX u;       // stacked u_i
  VecX lambda;  // stacked interaction wrenches
  RegionId from;
  RegionId to;
  std::size_t transition = 0;
};

struct ExecutionTrace {
  std::uint64_t seed = 0;
  double dt = 0.0;
  std::size_t agents = 0;
  std::vector<TraceRecord> records;
  dyn::AdaptiveStats integrator;
};

/// One edge of the executed lasso.
struct PlannedTransition {
  RegionId from;
  RegionId to;
  double t0 = 0.0;
  double duration = 0.0;
};

/// Prefix edges, then `loop_periods` passes around the loop.
std::vector<PlannedTransition> expand_plan(const plan::Plan& plan,
                                           const plan::TransitionSystem& wts,
                                           std::size_t loop_periods);

/// Body points sampled for containment: object center and every grasp point.
std::vector<Vec3> body_points(const Pose& object, const std::vector<GraspOffset>& grasps);

/// Runs the switching controller along the plan. Records are appended to
/// `trace` as they are produced, so it holds the partial run if this throws
/// (EnvelopeViolated, EnvelopeViolatedAtStart, RegionAssertionFailed,
/// SingularOrientation, NonFiniteState; all ExecutionError with the time).
void execute_plan(const Scenario& scenario, const plan::Plan& plan, ExecutionTrace& trace);

ExecutionTrace execute_plan(const Scenario& scenario, const plan::Plan& plan);

struct Violation {
  double t = 0.0;
  std::string kind;
  std::string detail;
};

struct TransitionReport {
  std::size_t index = 0;
  RegionId from;
  RegionId to;
  double t_start = 0.0;
  double t_end = 0.0;
  std::size_t samples = 0;
  double position_margin = 0.0;     // min over samples and axes of rho_s - |e_s|
  double velocity_margin = 0.0;     // min of rho_v - |e_v|
  double tube_margin = 0.0;         // min of l0 - |p_O - p_d|
  double containment_margin = 0.0;  // min distance of the L_hat ball to the cell-pair boundary
  double max_input = 0.0;           // max |u_i| component
  bool reached = false;             // system in the target region at t_end
};

inline constexpr std::size_t kMaxListedViolations = 1000;

struct Report {
  bool satisfied = false;          // formula holds, trace complete, and no violations
  bool formula_satisfied = false;
  bool complete = false;
  std::vector<plan::PlanStep> observed_run;  // beta: regions at the event times
  std::vector<TransitionReport> transitions;
  std::vector<Violation> violations;  // first kMaxListedViolations only
  std::size_t violation_count = 0;
  double load_sharing_error = 0.0;  // max relative spread of J^T u_i / c_i
  double max_input = 0.0;
  double saturation_threshold = 0.0;
  std::size_t saturation_samples = 0;
};

/// Rebuilds the timed behavior from the trace and checks it against the
/// formula, plus containment, envelopes and the tube at every sample.
Report verify_trace(const ExecutionTrace& trace, const plan::Plan& plan,
                    const Scenario& scenario, const mitl::Formula& formula);

}  // namespace coopmitl::exec
