#pragma once

#include <string>
#include <vector>

#include "orthorot/criterion.hpp"

namespace testutil {

// Independent k=2 reference: O(2) is two one-parameter branches, rotations
// T(theta) and reflections T(theta)*diag(1,-1), so constrained stationarity
// reduces to dQ/dtheta = 0 on each branch. Scans a uniform grid over
// [0, 2pi) per branch for sign changes and bisects each bracket.
std::vector<orthorot::RotationCandidate> theta_stationary_points(
    const orthorot::Mat& a, const orthorot::OrthomaxSpec& spec, int grid_points = 1000000);

struct OracleMatch {
  bool ok = false;
  std::string detail;
};

// Greedy bijection between two point sets: counts must agree and every
// oracle point must own a distinct solver point within the tolerances.
OracleMatch match_point_sets(const std::vector<orthorot::RotationCandidate>& solver,
                             const std::vector<orthorot::RotationCandidate>& oracle,
                             double t_tol, double q_tol);

}  // namespace testutil
