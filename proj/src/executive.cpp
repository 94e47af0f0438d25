#include "coopmitl/executive.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "coopmitl/errors.hpp"
#include "coopmitl/trajectory.hpp"

namespace coopmitl::exec {

std::vector<PlannedTransition> expand_plan(const plan::Plan& plan,
                                           const plan::TransitionSystem& wts,
                                           std::size_t loop_periods) {
  if (plan.steps.empty() || plan.loop_start >= plan.steps.size()) {
    throw Error(ErrorCode::InvalidConfig, "plan needs steps and a loop start inside them");
  }
  std::vector<RegionId> regions;
  for (const auto& s : plan.steps) regions.push_back(s.region);
  for (std::size_t p = 0; p < loop_periods; ++p) {
    for (std::size_t i = plan.loop_start; i < plan.steps.size(); ++i) {
      regions.push_back(plan.steps[i].region);
    }
  }
  std::vector<PlannedTransition> out;
  double t = 0.0;
  for (std::size_t i = 1; i < regions.size(); ++i) {
    const double d = wts.duration(regions[i - 1], regions[i]);
    out.push_back({regions[i - 1], regions[i], t, d});
    t += d;
  }
  return out;
}

std::vector<Vec3> body_points(const Pose& object, const std::vector<GraspOffset>& grasps) {
  std::vector<Vec3> pts{object.position};
  for (const auto& g : grasps) pts.push_back(kin::object_to_agent_pose(object, g).position);
  return pts;
}

namespace {

TraceRecord make_record(const dyn::CoupledModel& model, const ppc::Controller& controller,
                        const dyn::CoupledState& state, const PlannedTransition& edge,
                        std::size_t index) {
  const ppc::Diagnostics d = controller.tick(state.pose, state.velocity, state.time);
  TraceRecord r;
  r.t = state.time;
  r.pose = state.pose.vector();
  r.velocity = state.velocity;
  r.desired_pose = d.desired_pose;
  r.e_s = d.e_s;
  r.rho_s = d.rho_s;
  r.e_v = d.e_v;
  r.rho_v = d.rho_v;
  r.u = d.u;
  r.lambda = model.interaction_wrenches(state, d.u, model.acceleration(state, d.u));
  r.from = edge.from;
  r.to = edge.to;
  r.transition = index;
  return r;
}

void assert_in_region(const grid::Partition& partition, const std::vector<GraspOffset>& grasps,
                      const dyn::CoupledState& state, RegionId target) {
  if (!partition.system_in_region(state.pose.position, body_points(state.pose, grasps),
                                  target)) {
    std::ostringstream os;
    os << "coupled system is not in " << target << " (object at "
       << state.pose.position.transpose() << ")";
    throw ExecutionError(ErrorCode::RegionAssertionFailed, state.time, os.str());
  }
}

}  // namespace

void execute_plan(const Scenario& scenario, const plan::Plan& plan, ExecutionTrace& trace) {
  scenario.validate();
  const plan::TransitionSystem wts = scenario.build_wts();
  const grid::Partition& partition = wts.partition();
  if (plan.steps.empty() || plan.steps.front().region != scenario.initial_region) {
    throw Error(ErrorCode::InvalidConfig, "plan does not start in the scenario's initial region");
  }
  const std::vector<PlannedTransition> edges =
      expand_plan(plan, wts, scenario.loop_periods);
  const std::vector<GraspOffset> grasps = scenario.grasps();

  const dyn::CoupledModel model(scenario.object, scenario.agents);
  ppc::Controller controller(scenario.gains, scenario.envelopes, grasps);
  dyn::ClosedLoopIntegrator integrator(model, scenario.integrator);

  trace.seed = scenario.seed;
  trace.dt = scenario.dt;
  trace.agents = scenario.agents.size();
  trace.records.clear();

  dyn::CoupledState state = scenario.initial_state;
  state.time = 0.0;
  assert_in_region(partition, grasps, state, scenario.initial_region);

  const dyn::ControlLaw law = [&](const dyn::CoupledState& s) -> std::optional<VecX> {
    auto d = controller.evaluate(s.pose, s.velocity, s.time);
    if (!d) return std::nullopt;
    return std::move(d->u);
  };

  for (std::size_t m = 0; m < edges.size(); ++m) {
    const PlannedTransition& edge = edges[m];
    const double steps_real = edge.duration / scenario.dt;
    const auto steps = static_cast<std::size_t>(std::llround(steps_real));
    if (steps == 0 || std::abs(steps_real - static_cast<double>(steps)) > 1e-9 * steps_real) {
      throw Error(ErrorCode::InvalidConfig,
                  "transition durations must be whole multiples of dt");
    }
    try {
      state.time = edge.t0;
      const TransitionTrajectory trajectory =
          edge.from == edge.to
              ? self_loop_trajectory(partition, edge.from, edge.duration, edge.t0,
                                     scenario.desired_orientation)
              : make_transition_trajectory(partition, edge.from, edge.to, edge.duration,
                                           edge.t0, scenario.desired_orientation);
      controller.init_transition(state.pose, state.velocity, trajectory, edge.t0);
      integrator.reset_step_hint();
      for (std::size_t k = 0; k < steps; ++k) {
        trace.records.push_back(make_record(model, controller, state, edge, m));
        const double target = edge.t0 + static_cast<double>(k + 1) * scenario.dt;
        state = integrator.advance(state, law, target - state.time);
        state.time = target;
      }
      if (m + 1 == edges.size()) {
        trace.records.push_back(make_record(model, controller, state, edge, m));
      }
      trace.integrator = integrator.stats();
      assert_in_region(partition, grasps, state, edge.to);
    } catch (const ExecutionError&) {
      trace.integrator = integrator.stats();
      throw;
    } catch (const Error& e) {
      trace.integrator = integrator.stats();
      throw ExecutionError(e.code(), state.time, e.what());
    }
  }
}

ExecutionTrace execute_plan(const Scenario& scenario, const plan::Plan& plan) {
  ExecutionTrace trace;
  execute_plan(scenario, plan, trace);
  return trace;
}

namespace {

class ViolationLog {
 public:
  explicit ViolationLog(Report& report) : report_(report) {}
  void add(double t, std::string kind, std::string detail) {
    ++report_.violation_count;
    if (report_.violations.size() < kMaxListedViolations) {
      report_.violations.push_back({t, std::move(kind), std::move(detail)});
    }
  }

 private:
  Report& report_;
};

double ball_margin(const grid::Box& box, const Vec3& c, double r) {
  double m = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    m = std::min({m, (c(k) - r) - box.lo(k), box.hi(k) - (c(k) + r)});
  }
  return m;
}

}  // namespace

Report verify_trace(const ExecutionTrace& trace, const plan::Plan& plan,
                    const Scenario& scenario, const mitl::Formula& formula) {
  constexpr double kTolerance = 1e-9;
  Report report;
  report.saturation_threshold = scenario.saturation_threshold;
  ViolationLog log(report);

  const plan::TransitionSystem wts = scenario.build_wts();
  const grid::Partition& partition = wts.partition();
  const std::vector<GraspOffset> grasps = scenario.grasps();
  const double l0 = scenario.partition.l0;
  const double l_hat = scenario.partition.l_hat;
  const std::size_t n_agents = scenario.agents.size();
  const std::size_t n_steps = plan.steps.size();

  if (n_steps == 0 || plan.loop_start >= n_steps) {
    log.add(0.0, "plan", "plan has no steps or an invalid loop start");
    return report;
  }
  if (trace.agents != n_agents) {
    log.add(0.0, "trace", "trace agent count does not match the scenario");
    return report;
  }

  std::size_t max_index = 0;
  for (const auto& r : trace.records) max_index = std::max(max_index, r.transition);
  const std::size_t prefix_edges = n_steps - 1;
  const std::size_t loop_edges = n_steps - plan.loop_start;
  const std::size_t periods =
      max_index + 1 > prefix_edges ? (max_index + 1 - prefix_edges + loop_edges - 1) / loop_edges
                                   : 0;
  const std::vector<PlannedTransition> edges = expand_plan(plan, wts, std::max<std::size_t>(periods, 1));

  // Group samples per transition and check the structure of the trace.
  std::vector<std::vector<const TraceRecord*>> groups;
  double last_t = -std::numeric_limits<double>::infinity();
  bool structure_ok = true;
  for (const auto& r : trace.records) {
    if (!(r.t > last_t)) {
      log.add(r.t, "trace", "timestamps must strictly increase");
      structure_ok = false;
      break;
    }
    last_t = r.t;
    if (r.transition != groups.size() && r.transition + 1 != groups.size()) {
      log.add(r.t, "trace", "transition indices must be contiguous from 0");
      structure_ok = false;
      break;
    }
    if (r.transition == groups.size()) groups.emplace_back();
    const PlannedTransition& e = edges.at(r.transition);
    if (r.from != e.from || r.to != e.to) {
      std::ostringstream os;
      os << "transition " << r.transition << " logged as " << r.from << "->" << r.to
         << " but the plan has " << e.from << "->" << e.to;
      log.add(r.t, "trace", os.str());
      structure_ok = false;
      break;
    }
    groups.back().push_back(&r);
  }
  if (!structure_ok) return report;

  const auto finite = [](const auto& v) { return v.allFinite(); };
  for (std::size_t m = 0; m < groups.size(); ++m) {
    const PlannedTransition& edge = edges[m];
    const grid::Box closure = partition.closed_union(edge.from, edge.to);
    TransitionReport tr;
    tr.index = m;
    tr.from = edge.from;
    tr.to = edge.to;
    tr.t_start = edge.t0;
    tr.t_end = edge.t0 + edge.duration;
    tr.samples = groups[m].size();
    tr.position_margin = tr.velocity_margin = tr.tube_margin = tr.containment_margin =
        std::numeric_limits<double>::infinity();

    for (const TraceRecord* r : groups[m]) {
      if (!finite(r->pose) || !finite(r->velocity) || !finite(r->u) || !finite(r->lambda) ||
          r->u.size() != static_cast<Eigen::Index>(6 * n_agents)) {
        log.add(r->t, "non-finite", "state or input is not finite");
        continue;
      }
      const Pose pose = Pose::from_vector(r->pose);
      for (int k = 0; k < 6; ++k) {
        const double ms = r->rho_s(k) - std::abs(r->e_s(k));
        const double mv = r->rho_v(k) - std::abs(r->e_v(k));
        tr.position_margin = std::min(tr.position_margin, ms);
        tr.velocity_margin = std::min(tr.velocity_margin, mv);
        if (!(ms > 0.0)) {
          log.add(r->t, "position-envelope", "axis " + std::to_string(k + 1));
        }
        if (!(mv > 0.0)) {
          log.add(r->t, "velocity-envelope", "axis " + std::to_string(k + 1));
        }
      }
      const double tube = l0 - (pose.position - r->desired_pose.head<3>()).norm();
      tr.tube_margin = std::min(tr.tube_margin, tube);
      if (!(tube > 0.0)) log.add(r->t, "tube", "object farther than l0 from the desired position");

      const double ball = ball_margin(closure, pose.position, l_hat);
      tr.containment_margin = std::min(tr.containment_margin, ball);
      bool contained = ball >= -kTolerance;
      for (const Vec3& p : body_points(pose, grasps)) {
        contained = contained && closure.contains_closed(p, kTolerance);
      }
      if (!contained) {
        std::ostringstream os;
        os << "body outside the closure of " << edge.from << " and " << edge.to;
        log.add(r->t, "containment", os.str());
      }

      const double umax = r->u.cwiseAbs().maxCoeff();
      tr.max_input = std::max(tr.max_input, umax);
      if (umax > scenario.saturation_threshold) ++report.saturation_samples;

      // J_Oi^T u_i / c_i should be the same object-space vector for every agent.
      std::optional<Vec6> reference;
      for (std::size_t i = 0; i < n_agents; ++i) {
        const double c = scenario.gains.shares[i];
        if (c <= 0.0) continue;
        const Pose agent = kin::object_to_agent_pose(pose, grasps[i]);
        const Mat6 j = kin::object_agent_jacobian(agent, pose);
        const Vec6 v = j.transpose() * r->u.segment<6>(6 * static_cast<Eigen::Index>(i)) / c;
        if (!reference) {
          reference = v;
        } else if (reference->norm() > 1e-12) {
          report.load_sharing_error =
              std::max(report.load_sharing_error, (v - *reference).norm() / reference->norm());
        }
      }
    }
    report.max_input = std::max(report.max_input, tr.max_input);
    report.transitions.push_back(tr);
  }

  // Event states: the first sample of each transition, plus the end of the
  // last transition when the trace runs up to it.
  struct EventState {
    const TraceRecord* record;
    RegionId planned;
    double time;
  };
  std::vector<EventState> events;
  for (std::size_t m = 0; m < groups.size(); ++m) {
    events.push_back({groups[m].front(), edges[m].from, edges[m].t0});
  }
  std::size_t finished = groups.size();
  if (!groups.empty()) {
    const PlannedTransition& last = edges[groups.size() - 1];
    const TraceRecord* tail = groups.back().back();
    if (std::abs(tail->t - (last.t0 + last.duration)) <= 0.5 * trace.dt) {
      events.push_back({tail, last.to, last.t0 + last.duration});
    } else {
      finished -= 1;
    }
  }
  for (std::size_t e = 0; e < events.size(); ++e) {
    const Pose pose = Pose::from_vector(events[e].record->pose);
    if (std::abs(events[e].record->t - events[e].time) > 0.5 * trace.dt) {
      log.add(events[e].record->t, "timing", "region event away from its planned time");
    }
    RegionId observed = events[e].planned;
    if (!partition.system_in_region(pose.position, body_points(pose, grasps), observed)) {
      std::ostringstream os;
      os << "system not in " << observed << " at its planned time";
      log.add(events[e].time, "region", os.str());
      observed = partition.region_of(pose.position).value_or(RegionId{0});
    }
    if (e > 0 && e - 1 < report.transitions.size()) {
      report.transitions[e - 1].reached = observed == events[e].planned;
    }
    report.observed_run.push_back({observed, events[e].time});
  }

  report.complete = finished >= prefix_edges + loop_edges;
  const auto symbol = [&](RegionId r) -> PropositionSet {
    return partition.valid(r) ? wts.labels().labels(r) : PropositionSet{};
  };
  mitl::TimedWord word;
  if (report.complete) {
    for (std::size_t e = 0; e < n_steps; ++e) {
      word.prefix.push_back({symbol(report.observed_run[e].region), report.observed_run[e].time});
    }
    for (std::size_t e = n_steps; e < n_steps + loop_edges; ++e) {
      word.loop.push_back({symbol(report.observed_run[e].region),
                           report.observed_run[e].time - report.observed_run[e - 1].time});
    }
  } else {
    for (const auto& s : report.observed_run) word.prefix.push_back({symbol(s.region), s.time});
    if (word.prefix.empty()) word.prefix.push_back({PropositionSet{}, 0.0});
    word.loop.push_back({PropositionSet{}, scenario.transition_duration});
  }
  report.formula_satisfied = mitl::satisfies(word, formula);
  report.satisfied = report.formula_satisfied && report.complete && report.violation_count == 0;
  return report;
}

}  // namespace coopmitl::exec
