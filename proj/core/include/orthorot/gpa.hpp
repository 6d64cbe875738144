#pragma once

#include <vector>

#include "orthorot/criterion.hpp"
#include "orthorot/matrix.hpp"

namespace orthorot {

struct GpaOptions {
  double alpha0 = 1.0;
  int max_iter = 1000;
  double tol_stop = 1e-8;  // on the stationarity residual
  int max_halvings = 30;   // per iteration before declaring a stall
  bool record_trace = false;
};

struct GpaTraceEntry {
  int iteration = 0;
  double q_value = 0.0;
  double alpha = 0.0;
  double stat_residual = 0.0;
};

struct GpaResult {
  RotationCandidate candidate;
  int iterations = 0;
  bool converged = false;  // stationarity residual below tol_stop
  bool stalled = false;    // step collapsed before reaching tol_stop
  std::vector<GpaTraceEntry> trace;
};

/// Gradient projection ascent for the orthomax criterion: from T, step along
/// the gradient and project back onto the orthogonal group via the polar
/// factor, T+ = polar(T + alpha grad Q). alpha is halved within an iteration
/// until Q does not decrease and doubled after each accepted step. Monotone
/// in Q by construction. Finds a stationary point, not necessarily a
/// global or even local maximum.
GpaResult gpa_rotate(const Mat& a, const OrthomaxSpec& spec, const Mat& t0,
                     const GpaOptions& opts = {});

}  // namespace orthorot
