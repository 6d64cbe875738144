#include "orthorot/structure.hpp"

#include <cmath>
#include <stdexcept>

namespace orthorot {

PssAnalysis pss_analyze(const Mat& a, const StructureTols& tol) {
  require_finite(a, "pss_analyze input");
  const Eigen::Index p = a.rows();
  const Eigen::Index k = a.cols();
  if (k < 1 || p < 1) {
    throw std::invalid_argument("pss_analyze: empty matrix");
  }

  PssAnalysis out;
  std::vector<int> assignments(static_cast<std::size_t>(p), -1);
  std::vector<Eigen::Index> first_member;
  Mat reps(k, k);  // at most k clusters can stay mutually orthogonal
  int m = 0;

  for (Eigen::Index i = 0; i < p; ++i) {
    const double norm = a.row(i).norm();
    if (norm < tol.zero) continue;  // wildcard row
    int found = -1;
    for (int c = 0; c < m; ++c) {
      const double cos = a.row(i).dot(reps.row(c)) / norm;
      if (1.0 - std::abs(cos) < tol.parallel) {
        found = c;
        break;
      }
    }
    if (found < 0) {
      if (m == static_cast<int>(k)) {
        out.too_many_clusters = true;
        return out;
      }
      reps.row(m) = a.row(i) / norm;
      first_member.push_back(i);
      found = m++;
    }
    assignments[static_cast<std::size_t>(i)] = found;
  }

  for (int c1 = 0; c1 < m; ++c1) {
    for (int c2 = c1 + 1; c2 < m; ++c2) {
      if (std::abs(reps.row(c1).dot(reps.row(c2))) > tol.orthogonal) {
        // report the raw product of the first member rows, not the
        // normalized one; it is the number a reader can recompute directly
        out.violations.push_back(
            {c1, c2, a.row(first_member[static_cast<std::size_t>(c1)])
                         .dot(a.row(first_member[static_cast<std::size_t>(c2)]))});
      }
    }
  }
  if (!out.violations.empty()) return out;

  ClusterPartition part;
  part.assignments = std::move(assignments);
  part.cluster_count = m;
  part.representatives = reps.topRows(m);
  out.partition = std::move(part);
  return out;
}

std::optional<ClusterPartition> pss_partition(const Mat& a, const StructureTols& tol) {
  return pss_analyze(a, tol).partition;
}

Mat pss_rotation(const Mat& a, const ClusterPartition& partition, const StructureTols& tol) {
  const Eigen::Index k = a.cols();
  if (partition.cluster_count < 0 || partition.cluster_count > static_cast<int>(k) ||
      partition.representatives.rows() != partition.cluster_count ||
      partition.representatives.cols() != k) {
    throw std::invalid_argument("pss_rotation: malformed partition");
  }
  NumericTolerances ext_tol;
  ext_tol.orthogonality = tol.orthogonal;
  const Mat s = qr_orthonormal_extension(partition.representatives, ext_tol);
  return s.transpose();
}

ThurstoneReport thurstone_report(const Mat& lambda, double zero_tol) {
  require_finite(lambda, "thurstone_report input");
  const Eigen::Index p = lambda.rows();
  const Eigen::Index k = lambda.cols();
  if (k < 2) {
    throw std::invalid_argument("thurstone_report: need at least two columns");
  }

  ThurstoneReport rep;
  rep.gamma = static_cast<int>(p) + 1;
  rep.delta = static_cast<int>(p) + 1;
  for (Eigen::Index u = 0; u < k; ++u) {
    for (Eigen::Index v = u + 1; v < k; ++v) {
      ThurstonePairCount pc;
      pc.col_u = static_cast<int>(u);
      pc.col_v = static_cast<int>(v);
      for (Eigen::Index i = 0; i < p; ++i) {
        const bool zu = std::abs(lambda(i, u)) < zero_tol;
        const bool zv = std::abs(lambda(i, v)) < zero_tol;
        if (zu && zv) ++pc.zero_in_both;
        else if (zu || zv) ++pc.zero_in_exactly_one;
      }
      rep.gamma = std::min(rep.gamma, pc.zero_in_exactly_one);
      rep.delta = std::min(rep.delta, pc.zero_in_both);
      rep.per_pair.push_back(pc);
    }
  }

  rep.every_row_has_zero = true;
  for (Eigen::Index i = 0; i < p; ++i) {
    bool has = false;
    for (Eigen::Index j = 0; j < k; ++j) has = has || std::abs(lambda(i, j)) < zero_tol;
    rep.every_row_has_zero = rep.every_row_has_zero && has;
  }
  rep.every_column_has_k_zeros = true;
  for (Eigen::Index j = 0; j < k; ++j) {
    int zeros = 0;
    for (Eigen::Index i = 0; i < p; ++i) {
      if (std::abs(lambda(i, j)) < zero_tol) ++zeros;
    }
    rep.every_column_has_k_zeros = rep.every_column_has_k_zeros && zeros >= static_cast<int>(k);
  }
  return rep;
}

double identity_stationarity_residual(const Mat& a, const OrthomaxSpec& spec,
                                      Eigen::Index u, Eigen::Index v) {
  if (a.rows() != spec.p || a.cols() != spec.k) {
    throw std::invalid_argument("identity_stationarity_residual: A shape mismatch");
  }
  if (u < 0 || v < 0 || u >= spec.k || v >= spec.k || u == v) {
    throw std::invalid_argument("identity_stationarity_residual: bad column pair");
  }
  require_finite(a, "identity_stationarity_residual input");
  const double c = spec.omega / static_cast<double>(spec.p);
  const double nu = a.col(u).squaredNorm();
  const double nv = a.col(v).squaredNorm();
  double f = 0.0;
  for (Eigen::Index i = 0; i < spec.p; ++i) {
    const double au = a(i, u);
    const double av = a(i, v);
    f += au * av * ((au * au - av * av) - c * (nu - nv));
  }
  return f;
}

}  // namespace orthorot
