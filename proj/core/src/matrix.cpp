#include "orthorot/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace orthorot {

bool all_finite(const Mat& m) {
  return m.allFinite();
}

void require_finite(const Mat& m, const char* what) {
  if (!m.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": non-finite entries");
  }
}

Mat matmul(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("matmul: inner dimensions " + std::to_string(a.cols()) +
                                " and " + std::to_string(b.rows()) + " do not match");
  }
  require_finite(a, "matmul lhs");
  require_finite(b, "matmul rhs");
  return a * b;
}

Mat qr_orthonormal_extension(const Mat& rows, const NumericTolerances& tol) {
  const Eigen::Index m = rows.rows();
  const Eigen::Index k = rows.cols();
  if (m > k) {
    throw std::invalid_argument("qr_orthonormal_extension: more vectors than dimensions");
  }
  require_finite(rows, "qr_orthonormal_extension input");

  Mat q(k, k);
  for (Eigen::Index i = 0; i < m; ++i) {
    double n = rows.row(i).norm();
    if (n < 1e-14) {
      throw std::invalid_argument("qr_orthonormal_extension: zero input row");
    }
    for (Eigen::Index j = 0; j < i; ++j) {
      if (std::abs(rows.row(i).dot(rows.row(j))) > tol.orthogonality * n * rows.row(j).norm() + tol.orthogonality) {
        throw std::invalid_argument("qr_orthonormal_extension: input rows not orthogonal");
      }
    }
    q.row(i) = rows.row(i) / n;
  }

  // Complete with Gram-Schmidt over the standard basis; two projection passes
  // keep the result orthonormal to ~1e-15 even for nearly dependent picks.
  Eigen::Index filled = m;
  for (Eigen::Index e = 0; e < k && filled < k; ++e) {
    Vec v = Vec::Zero(k);
    v(e) = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index j = 0; j < filled; ++j) {
        v -= q.row(j).dot(v) * q.row(j).transpose();
      }
    }
    double n = v.norm();
    if (n > 0.5) {  // e was not (numerically) in the current span
      q.row(filled++) = v.transpose() / n;
    }
  }
  if (filled < k) {
    throw std::invalid_argument("qr_orthonormal_extension: could not complete basis");
  }
  return q;
}

Mat svd_polar_factor(const Mat& m, const NumericTolerances& tol) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("svd_polar_factor: matrix must be square");
  }
  require_finite(m, "svd_polar_factor input");
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(sv.size() - 1) <= tol.rank * sv(0)) {
    throw std::invalid_argument("svd_polar_factor: singular input");
  }
  return svd.matrixU() * svd.matrixV().transpose();
}

double det(const Mat& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("det: matrix must be square");
  }
  if (m.rows() == 0) return 1.0;
  return Eigen::PartialPivLU<Mat>(m).determinant();
}

Vec solve_least_squares(const Mat& a, const Vec& b) {
  if (a.rows() != b.size()) {
    throw std::invalid_argument("solve_least_squares: dimension mismatch");
  }
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.solve(b);
}

double orthogonality_residual(const Mat& t) {
  return (t.transpose() * t - Mat::Identity(t.cols(), t.cols())).norm();
}

double column_orbit_distance(const Mat& x, const Mat& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw std::invalid_argument("column_orbit_distance: shape mismatch");
  }
  const Eigen::Index k = x.cols();
  // squared distance decomposes per assigned column pair, so precompute both
  // sign choices for every (target column, source column) pair
  Mat cost_pos(k, k), cost_neg(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      cost_pos(i, j) = (x.col(i) - y.col(j)).squaredNorm();
      cost_neg(i, j) = (x.col(i) + y.col(j)).squaredNorm();
    }
  }
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < k; ++i) perm[static_cast<std::size_t>(i)] = i;
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
      const Eigen::Index j = perm[static_cast<std::size_t>(i)];
      total += std::min(cost_pos(i, j), cost_neg(i, j));
    }
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::sqrt(best);
}

}  // namespace orthorot
