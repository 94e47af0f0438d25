#pragma once

#include <cmath>
#include <random>

#include "coopmitl/kinematics.hpp"

namespace testutil {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Orientation with pitch kept well away from +-pi/2.
inline coopmitl::EulerAngles random_euler(std::mt19937_64& rng, double max_pitch = 1.2) {
  return {uniform(rng, -3.1, 3.1), uniform(rng, -max_pitch, max_pitch), uniform(rng, -3.1, 3.1)};
}

inline coopmitl::Vec3 random_vec3(std::mt19937_64& rng, double scale) {
  return {uniform(rng, -scale, scale), uniform(rng, -scale, scale), uniform(rng, -scale, scale)};
}

inline coopmitl::Vec6 random_vec6(std::mt19937_64& rng, double scale) {
  coopmitl::Vec6 v;
  for (int k = 0; k < 6; ++k) v(k) = uniform(rng, -scale, scale);
  return v;
}

inline coopmitl::Pose random_pose(std::mt19937_64& rng) {
  return {random_vec3(rng, 3.0), random_euler(rng)};
}

inline double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace testutil
