#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "coopmitl/dynamics.hpp"
#include "coopmitl/partition.hpp"
#include "coopmitl/planner.hpp"
#include "coopmitl/ppc.hpp"

namespace coopmitl {

/// Everything needed to plan, simulate and verify one task.
struct Scenario {
  std::string name = "scenario";
  std::string formula;

  grid::PartitionConfig partition;
  grid::Labeling labels;
  double transition_duration = 5.0;  // s, every transition unless overridden
  std::map<std::pair<RegionId, RegionId>, double> duration_overrides;
  RegionId initial_region{1};

  dyn::ObjectParams object;
  std::vector<dyn::AgentParams> agents;

  ppc::ControllerGains gains;
  ppc::EnvelopeConfig envelopes;
  EulerAngles desired_orientation;

  dyn::CoupledState initial_state;
  double dt = 1e-3;  // s, logging step
  std::uint64_t seed = 42;
  std::size_t loop_periods = 1;
  double saturation_threshold = 1000.0;  // N or N m, per component, reported only
  dyn::AdaptiveOptions integrator;

  [[nodiscard]] grid::Partition build_partition() const;
  [[nodiscard]] plan::TransitionSystem build_wts() const;
  [[nodiscard]] std::vector<GraspOffset> grasps() const;
  /// Checks cross-field consistency; throws InvalidConfig.
  void validate() const;
};

/// Parses the TOML scenario format (see docs/formats.md). Throws InvalidConfig or Io.
Scenario parse_scenario(std::string_view toml_text, const std::string& source = "<string>");
Scenario load_scenario(const std::filesystem::path& path);

/// Disturbance and uncertainty phases drawn from a 64-bit Mersenne Twister
/// seeded with `seed`, uniform in [0, 2 pi). Overwrites every phase.
void apply_seed(Scenario& scenario, std::uint64_t seed);

}  // namespace coopmitl
