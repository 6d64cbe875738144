#include "orthorot/gpa.hpp"

#include <algorithm>
#include <stdexcept>

namespace orthorot {

GpaResult gpa_rotate(const Mat& a, const OrthomaxSpec& spec, const Mat& t0,
                     const GpaOptions& opts) {
  if (t0.rows() != spec.k || t0.cols() != spec.k) {
    throw std::invalid_argument("gpa_rotate: T0 must be k x k");
  }
  if (orthogonality_residual(t0) > 1e-8) {
    throw std::invalid_argument("gpa_rotate: T0 is not orthogonal");
  }

  GpaResult res;
  Mat t = t0;
  double q = orthomax_value(a * t, spec);
  double alpha = opts.alpha0;

  for (int it = 0; it < opts.max_iter; ++it) {
    const double stat = stationarity_residual(a, t, spec);
    if (opts.record_trace) res.trace.push_back({it, q, alpha, stat});
    if (stat < opts.tol_stop) {
      res.converged = true;
      res.iterations = it;
      res.candidate = make_candidate(a, t, spec);
      return res;
    }

    const Mat grad = orthomax_gradient(a, t, spec);
    bool accepted = false;
    for (int h = 0; h <= opts.max_halvings; ++h) {
      Mat next;
      try {
        next = svd_polar_factor(t + alpha * grad);
      } catch (const std::invalid_argument&) {
        alpha *= 0.5;  // projection undefined for this step, treat as too long
        continue;
      }
      const double qn = orthomax_value(a * next, spec);
      if (qn >= q) {
        t = next;
        q = qn;
        alpha = std::min(alpha * 2.0, 1e8);
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      res.stalled = true;
      res.iterations = it + 1;
      res.candidate = make_candidate(a, t, spec);
      res.converged = res.candidate.stat_residual < opts.tol_stop;
      return res;
    }
  }

  res.iterations = opts.max_iter;
  res.candidate = make_candidate(a, t, spec);
  res.converged = res.candidate.stat_residual < opts.tol_stop;
  if (opts.record_trace) {
    res.trace.push_back({opts.max_iter, q, alpha, res.candidate.stat_residual});
  }
  return res;
}

}  // namespace orthorot
