#include "orthorot/criterion.hpp"

#include <stdexcept>
#include <string>

namespace orthorot {

namespace {

void check_shape(double omega, Eigen::Index p, Eigen::Index k) {
  if (p < 1 || k < 1 || k > p) {
    throw std::invalid_argument("OrthomaxSpec: need 1 <= k <= p");
  }
  if (!(omega >= 0.0) || !(omega <= static_cast<double>(p))) {
    throw std::invalid_argument("OrthomaxSpec: omega " + std::to_string(omega) +
                                " outside [0, p]");
  }
}

void check_lambda(const Mat& lambda, const OrthomaxSpec& spec) {
  if (lambda.rows() != spec.p || lambda.cols() != spec.k) {
    throw std::invalid_argument("orthomax: loading matrix shape does not match spec");
  }
  require_finite(lambda, "orthomax loadings");
}

}  // namespace

OrthomaxSpec OrthomaxSpec::quartimax(Eigen::Index p, Eigen::Index k) {
  return custom(0.0, p, k);
}

OrthomaxSpec OrthomaxSpec::varimax(Eigen::Index p, Eigen::Index k) {
  return custom(1.0, p, k);
}

OrthomaxSpec OrthomaxSpec::equamax(Eigen::Index p, Eigen::Index k) {
  return custom(static_cast<double>(k) / 2.0, p, k);
}

OrthomaxSpec OrthomaxSpec::parsimax(Eigen::Index p, Eigen::Index k) {
  double pd = static_cast<double>(p);
  double kd = static_cast<double>(k);
  return custom(pd * (kd - 1.0) / (pd + kd - 2.0), p, k);
}

OrthomaxSpec OrthomaxSpec::custom(double omega, Eigen::Index p, Eigen::Index k) {
  check_shape(omega, p, k);
  return OrthomaxSpec{omega, p, k};
}

double orthomax_value(const Mat& lambda, const OrthomaxSpec& spec) {
  check_lambda(lambda, spec);
  const Mat sq = lambda.array().square();
  double quartic = sq.array().square().sum();
  double colsum = sq.colwise().sum().array().square().sum();
  return quartic - (spec.omega / static_cast<double>(spec.p)) * colsum;
}

Mat orthomax_gradient(const Mat& a, const Mat& t, const OrthomaxSpec& spec) {
  if (a.rows() != spec.p || a.cols() != spec.k) {
    throw std::invalid_argument("orthomax_gradient: A shape does not match spec");
  }
  if (t.rows() != spec.k || t.cols() != spec.k) {
    throw std::invalid_argument("orthomax_gradient: T must be k x k");
  }
  require_finite(a, "orthomax_gradient A");
  require_finite(t, "orthomax_gradient T");

  const Mat lambda = a * t;
  const Mat sq = lambda.array().square();
  const Vec colnorm = sq.colwise().sum();  // ||l_v||^2 per column
  const double c = spec.omega / static_cast<double>(spec.p);
  // M_iv = 4 l_iv (l_iv^2 - c ||l_v||^2); grad = A^T M
  Mat m(spec.p, spec.k);
  for (Eigen::Index v = 0; v < spec.k; ++v) {
    m.col(v) = (4.0 * lambda.col(v).array() * (sq.col(v).array() - c * colnorm(v))).matrix();
  }
  return a.transpose() * m;
}

double stationarity_residual(const Mat& a, const Mat& t, const OrthomaxSpec& spec) {
  const Mat m = t.transpose() * orthomax_gradient(a, t, spec);
  return (m - m.transpose()).norm();
}

RotationCandidate make_candidate(const Mat& a, const Mat& t, const OrthomaxSpec& spec) {
  RotationCandidate c;
  c.t = t;
  c.lambda = matmul(a, t);
  c.q_value = orthomax_value(c.lambda, spec);
  c.orth_residual = orthogonality_residual(t);
  c.stat_residual = stationarity_residual(a, t, spec);
  return c;
}

}  // namespace orthorot
