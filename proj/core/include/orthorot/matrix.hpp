#pragma once

#include <Eigen/Dense>

namespace orthorot {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

struct NumericTolerances {
  double orthogonality = 1e-10;  // feasibility of an orthonormal extension
  double rank = 1e-12;           // relative singular value cutoff
};

/// Dimension-checked product. Throws std::invalid_argument on mismatch or
/// non-finite input.
Mat matmul(const Mat& a, const Mat& b);

/// Extends m pairwise-orthogonal nonzero k-vectors (rows of `rows`) to an
/// orthogonal k x k matrix whose first m rows are the normalized inputs.
/// Throws std::invalid_argument if the inputs are not pairwise orthogonal,
/// contain a (near-)zero row, or m > k.
Mat qr_orthonormal_extension(const Mat& rows, const NumericTolerances& tol = {});

/// Orthogonal polar factor U V^T of a square nonsingular matrix; the closest
/// orthogonal matrix in Frobenius norm, equivalently the maximizer of
/// trace(O^T M) over orthogonal O. Throws std::invalid_argument if M is
/// singular at the rank tolerance.
Mat svd_polar_factor(const Mat& m, const NumericTolerances& tol = {});

/// Determinant via pivoted LU.
double det(const Mat& m);

/// Minimum-norm least squares solution of a x = b (SVD based, handles
/// rank-deficient a).
Vec solve_least_squares(const Mat& a, const Vec& b);

/// || T^T T - I ||_F
double orthogonality_residual(const Mat& t);

/// min over column permutations P and sign matrices D of || x - y P D ||_F;
/// the distance between the orbits of x and y under the 2^k k! column
/// symmetries. Exhaustive over the group, intended for small k.
double column_orbit_distance(const Mat& x, const Mat& y);

bool all_finite(const Mat& m);

/// Throws std::invalid_argument mentioning `what` if m has NaN or Inf.
void require_finite(const Mat& m, const char* what);

}  // namespace orthorot
