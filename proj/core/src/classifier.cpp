#include "orthorot/classifier.hpp"

#include <cmath>
#include <stdexcept>

namespace orthorot {

namespace {

constexpr double kDetFloor = 1e-12;
constexpr double kMultiplierGate = 1e-6;

void check_inputs(const Mat& a, const OrthomaxSpec& spec, const Mat& t) {
  if (a.rows() != spec.p || a.cols() != spec.k) {
    throw std::invalid_argument("classifier: A shape does not match spec");
  }
  if (t.rows() != spec.k || t.cols() != spec.k) {
    throw std::invalid_argument("classifier: T must be k x k");
  }
  require_finite(a, "classifier A");
  require_finite(t, "classifier T");
}

}  // namespace

const char* to_string(StationLabel label) {
  switch (label) {
    case StationLabel::max: return "max";
    case StationLabel::min: return "min";
    default: return "indeterminate";
  }
}

Mat constraint_jacobian(const Mat& t) {
  if (t.rows() != t.cols()) {
    throw std::invalid_argument("constraint_jacobian: T must be square");
  }
  const Eigen::Index k = t.cols();
  const Eigen::Index m = k * (k + 1) / 2;
  Mat b = Mat::Zero(m, k * k);
  Eigen::Index row = 0;
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index l = j; l < k; ++l, ++row) {
      // d(T^T T - I)_jl / dt_uv = [v==j] t_ul + [v==l] t_uj
      for (Eigen::Index u = 0; u < k; ++u) {
        b(row, u * k + j) += t(u, l);
        b(row, u * k + l) += t(u, j);
      }
    }
  }
  return b;
}

std::pair<Vec, double> recover_multipliers(const Mat& a, const OrthomaxSpec& spec,
                                           const Mat& t) {
  check_inputs(a, spec, t);
  const Eigen::Index k = spec.k;
  const Mat grad = orthomax_gradient(a, t, spec);
  Vec g(k * k);
  for (Eigen::Index u = 0; u < k; ++u) {
    for (Eigen::Index v = 0; v < k; ++v) g(u * k + v) = grad(u, v);
  }
  const Mat bt = constraint_jacobian(t).transpose();  // k^2 x m
  const Vec mu = solve_least_squares(bt, -g);
  const double residual = (g + bt * mu).norm();
  return {mu, residual};
}

Mat lagrangian_hessian(const Mat& a, const OrthomaxSpec& spec, const Mat& t, const Vec& mu) {
  check_inputs(a, spec, t);
  const Eigen::Index k = spec.k;
  if (mu.size() != k * (k + 1) / 2) {
    throw std::invalid_argument("lagrangian_hessian: multiplier count mismatch");
  }
  const double c = spec.omega / static_cast<double>(spec.p);
  const Mat lambda = a * t;
  Mat h = Mat::Zero(k * k, k * k);

  // criterion part: block diagonal over columns of T because Q is separable
  // across columns of L = A T;
  //   d2Q/dt_uv dt_u'v = 4 sum_i a_iu a_iu' (3 l_iv^2 - c ||l_v||^2)
  //                      - 8 c (A^T l_v)_u (A^T l_v)_u'
  for (Eigen::Index v = 0; v < k; ++v) {
    const Vec lv = lambda.col(v);
    const double nv = lv.squaredNorm();
    const Vec w = (3.0 * lv.array().square() - c * nv).matrix();
    const Mat block = 4.0 * a.transpose() * w.asDiagonal() * a -
                      8.0 * c * (a.transpose() * lv) * (a.transpose() * lv).transpose();
    for (Eigen::Index u = 0; u < k; ++u) {
      for (Eigen::Index u2 = 0; u2 < k; ++u2) {
        h(u * k + v, u2 * k + v) += block(u, u2);
      }
    }
  }

  // constraint part: d2 g_jl contributes mu_jl at ((u,j),(u,l)) and mirrored
  Eigen::Index idx = 0;
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index l = j; l < k; ++l, ++idx) {
      for (Eigen::Index u = 0; u < k; ++u) {
        h(u * k + j, u * k + l) += mu(idx);
        h(u * k + l, u * k + j) += mu(idx);
      }
    }
  }
  return h;
}

Mat bordered_hessian(const Mat& a, const OrthomaxSpec& spec, const Mat& t, const Vec& mu,
                     int b) {
  check_inputs(a, spec, t);
  const Eigen::Index k = spec.k;
  const Eigen::Index m = k * (k + 1) / 2;
  if (b <= m || b > k * k) {
    throw std::invalid_argument("bordered_hessian: b must lie in (k(k+1)/2, k^2]");
  }
  const Mat h = lagrangian_hessian(a, spec, t, mu);
  const Mat bj = constraint_jacobian(t);
  Mat out = Mat::Zero(b + m, b + m);
  out.topLeftCorner(b, b) = h.topLeftCorner(b, b);
  out.block(b, 0, m, b) = bj.leftCols(b);
  out.block(0, b, b, m) = bj.leftCols(b).transpose();
  return out;
}

ClassifiedPoint classify_point(const Mat& a, const OrthomaxSpec& spec, const Mat& t) {
  ClassifiedPoint cp;
  cp.candidate = make_candidate(a, t, spec);
  auto [mu, residual] = recover_multipliers(a, spec, t);
  cp.multipliers = mu;
  cp.multiplier_residual = residual;
  if (residual > kMultiplierGate) {
    throw std::invalid_argument("classify_point: not a stationary point (multiplier residual " +
                                std::to_string(residual) + ")");
  }

  const int k = static_cast<int>(spec.k);
  const int m = k * (k + 1) / 2;
  bool all_max = true;
  bool all_min = true;
  bool degenerate = (m + 1 > k * k);  // k = 1: empty range, no information
  const int min_sign = (m % 2 == 0) ? 1 : -1;
  for (int b = m + 1; b <= k * k; ++b) {
    const double d = det(bordered_hessian(a, spec, t, mu, b));
    cp.determinant_trail.emplace_back(b, d);
    if (std::abs(d) < kDetFloor) {
      degenerate = true;
      continue;
    }
    const int max_sign = (b % 2 == 0) ? 1 : -1;
    if (max_sign * d <= 0.0) all_max = false;
    if (min_sign * d <= 0.0) all_min = false;
  }
  if (degenerate) {
    cp.label = StationLabel::indeterminate;
  } else if (all_max) {
    cp.label = StationLabel::max;
  } else if (all_min) {
    cp.label = StationLabel::min;
  } else {
    cp.label = StationLabel::indeterminate;
  }
  return cp;
}

ClassifiedSet classify_set(const StationarySet& set, const Mat& a, const OrthomaxSpec& spec) {
  ClassifiedSet out;
  out.points.reserve(set.points.size());
  for (const auto& pt : set.points) {
    out.points.push_back(classify_point(a, spec, pt.t));
  }
  out.class_labels.reserve(set.classes.size());
  for (const auto& cls : set.classes) {
    const StationLabel label =
        out.points[static_cast<std::size_t>(cls.representative)].label;
    out.class_labels.push_back(label);
    if (label == StationLabel::max) ++out.n_max;
    else if (label == StationLabel::min) ++out.n_min;
    else ++out.n_indet;
  }
  return out;
}

}  // namespace orthorot
