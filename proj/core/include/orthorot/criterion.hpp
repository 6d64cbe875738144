#pragma once

#include "orthorot/matrix.hpp"

namespace orthorot {

// One member of the orthomax family on a p x k problem:
//   Q(L) = sum_ij L_ij^4 - (omega/p) * sum_j (sum_i L_ij^2)^2,  0 <= omega <= p.
// The named members fix omega as a function of (p, k).
struct OrthomaxSpec {
  double omega = 0.0;
  Eigen::Index p = 0;
  Eigen::Index k = 0;

  static OrthomaxSpec quartimax(Eigen::Index p, Eigen::Index k);  // omega = 0
  static OrthomaxSpec varimax(Eigen::Index p, Eigen::Index k);    // omega = 1
  static OrthomaxSpec equamax(Eigen::Index p, Eigen::Index k);    // omega = k/2
  static OrthomaxSpec parsimax(Eigen::Index p, Eigen::Index k);   // omega = p(k-1)/(p+k-2)
  static OrthomaxSpec custom(double omega, Eigen::Index p, Eigen::Index k);
};

/// Q value of a loading matrix (lambda is p x k, already rotated).
double orthomax_value(const Mat& lambda, const OrthomaxSpec& spec);

/// Gradient of T |-> Q(A T) as a k x k matrix:
///   dQ/dt_uv = 4 sum_i a_iu l_iv (l_iv^2 - (omega/p) ||l_v||^2),  L = A T.
Mat orthomax_gradient(const Mat& a, const Mat& t, const OrthomaxSpec& spec);

/// || M - M^T ||_F for M = T^T grad Q(A T); zero exactly at the stationary
/// points of the orthogonally constrained problem.
double stationarity_residual(const Mat& a, const Mat& t, const OrthomaxSpec& spec);

// A rotation T of A bundled with its loadings and diagnostic residuals.
struct RotationCandidate {
  Mat t;
  Mat lambda;  // A * t, recomputed on construction
  double q_value = 0.0;
  double orth_residual = 0.0;
  double stat_residual = 0.0;

  bool feasible(double tol = 1e-8) const { return orth_residual < tol; }
};

RotationCandidate make_candidate(const Mat& a, const Mat& t, const OrthomaxSpec& spec);

}  // namespace orthorot
