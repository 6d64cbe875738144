#pragma once

#include <utility>
#include <vector>

#include "orthorot/criterion.hpp"
#include "orthorot/homotopy.hpp"
#include "orthorot/matrix.hpp"

namespace orthorot {

enum class StationLabel { max, min, indeterminate };

const char* to_string(StationLabel label);

/// Least squares recovery of the multipliers mu of the Lagrangian
/// L(T, mu) = Q(A T) + sum_{j<=l} mu_jl (T^T T - I)_jl
/// from grad Q + B^T mu = 0 (B = constraint Jacobian). Returns (mu, residual)
/// with mu ordered like the constraints, (j,l) lexicographic with j <= l.
std::pair<Vec, double> recover_multipliers(const Mat& a, const OrthomaxSpec& spec,
                                           const Mat& t);

/// Hessian of the Lagrangian in the k^2 variables of T (row-major), closed
/// form: block-diagonal criterion part plus the multiplier-weighted constraint
/// part.
Mat lagrangian_hessian(const Mat& a, const OrthomaxSpec& spec, const Mat& t, const Vec& mu);

/// Jacobian of the k(k+1)/2 constraints, rows in constraint order, columns in
/// variable order.
Mat constraint_jacobian(const Mat& t);

/// Bordered matrix [[A^b, (B^b)^T], [B^b, 0]] with A^b the leading b x b
/// block of the Lagrangian Hessian and B^b the first b columns of the
/// constraint Jacobian; b ranges over k(k+1)/2 + 1 .. k^2.
Mat bordered_hessian(const Mat& a, const OrthomaxSpec& spec, const Mat& t, const Vec& mu,
                     int b);

struct ClassifiedPoint {
  RotationCandidate candidate;
  Vec multipliers;
  double multiplier_residual = 0.0;
  StationLabel label = StationLabel::indeterminate;
  std::vector<std::pair<int, double>> determinant_trail;  // (b, det H^b)
};

/// Second-order label of a stationary rotation: max if (-1)^b det H^b > 0 for
/// every b in the range, min if (-1)^{k(k+1)/2} det H^b > 0 for every b,
/// otherwise indeterminate. Any |det| < 1e-12 is indeterminate (the sign test
/// needs nonzero determinants), as is k = 1 where the b-range is empty.
/// Throws std::invalid_argument if the point is not stationary (multiplier
/// residual above 1e-6).
ClassifiedPoint classify_point(const Mat& a, const OrthomaxSpec& spec, const Mat& t);

struct ClassifiedSet {
  std::vector<ClassifiedPoint> points;        // parallel to set.points
  std::vector<StationLabel> class_labels;     // parallel to set.classes
  int n_max = 0;    // classes labelled max
  int n_min = 0;
  int n_indet = 0;
};

/// Classifies every point of a solver result; class labels come from class
/// representatives.
ClassifiedSet classify_set(const StationarySet& set, const Mat& a, const OrthomaxSpec& spec);

}  // namespace orthorot
