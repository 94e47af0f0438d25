#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "coopmitl/mitl.hpp"
#include "coopmitl/partition.hpp"

namespace coopmitl::plan {

/// Weighted transition system over the partition: face-adjacent moves plus a
/// self-loop per region, each weighted by its duration.
class TransitionSystem {
 public:
  TransitionSystem(grid::Partition partition, grid::Labeling labels, double default_duration,
                   std::map<std::pair<RegionId, RegionId>, double> durations = {},
                   std::vector<RegionId> initial = {RegionId{1}});

  [[nodiscard]] const grid::Partition& partition() const { return partition_; }
  [[nodiscard]] const grid::Labeling& labels() const { return labels_; }
  [[nodiscard]] const std::vector<RegionId>& initial() const { return initial_; }

  [[nodiscard]] bool has_transition(RegionId from, RegionId to) const;
  /// Throws NotAdjacent when there is no such transition.
  [[nodiscard]] double duration(RegionId from, RegionId to) const;
  /// Neighbors in ascending order, then the self-loop.
  [[nodiscard]] std::vector<RegionId> successors(RegionId from) const;
  [[nodiscard]] std::size_t transition_count() const;

 private:
  grid::Partition partition_;
  grid::Labeling labels_;
  double default_duration_;
  std::map<std::pair<RegionId, RegionId>, double> durations_;
  std::vector<RegionId> initial_;
};

/// Convenience constructor mirroring the abstraction step.
TransitionSystem build_wts(const grid::Partition& partition, const grid::Labeling& labels,
                           double default_duration,
                           std::map<std::pair<RegionId, RegionId>, double> durations = {},
                           std::vector<RegionId> initial = {RegionId{1}});

struct PlanStep {
  RegionId region;
  double time = 0.0;  // s
};

/// Lasso run: steps[0..] then forever steps[loop_start..], the last step
/// moving back to steps[loop_start].
struct Plan {
  std::vector<PlanStep> steps;
  std::size_t loop_start = 0;
};

/// Timed word generated by a plan: every step in the prefix, then
/// steps[loop_start..] repeated, each loop event carrying the duration of the
/// transition into it.
mitl::TimedWord plan_word(const Plan& plan, const TransitionSystem& wts);

/// Structural validity (transitions, timing, initial region) and satisfaction of f.
bool validate_plan(const Plan& plan, const TransitionSystem& wts, const mitl::Formula& f);

struct PlannerOptions {
  std::size_t max_states = 2'000'000;
};

/// Breadth-first search over (region, residual formula) pairs for a lasso
/// with the shortest prefix, then the shortest loop. Returns nullopt when no
/// accepting run exists. Throws UnsupportedFragment outside the fragment.
std::optional<Plan> find_accepting_run(const TransitionSystem& wts, const mitl::Formula& f,
                                       RegionId initial, const PlannerOptions& options = {});

}  // namespace coopmitl::plan
