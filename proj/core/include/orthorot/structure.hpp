#pragma once

#include <optional>
#include <vector>

#include "orthorot/criterion.hpp"
#include "orthorot/matrix.hpp"

namespace orthorot {

struct StructureTols {
  double parallel = 1e-8;    // on 1 - |cos angle| between rows
  double orthogonal = 1e-8;  // on |dot| between cluster representatives
  double zero = 1e-8;        // row norms below this are wildcard rows
};

// Grouping of the rows of a p x k matrix into m <= k clusters of pairwise
// parallel rows, clusters mutually orthogonal. Zero rows carry the wildcard
// label -1 and belong to every cluster.
struct ClusterPartition {
  std::vector<int> assignments;  // per row: cluster id in [0, m) or -1
  int cluster_count = 0;
  Mat representatives;  // m x k, unit norm, one per cluster (first member direction)
};

struct PssViolation {
  int cluster_a = 0;
  int cluster_b = 0;
  double raw_dot = 0.0;  // unnormalized dot of the clusters' first raw rows
};

struct PssAnalysis {
  std::optional<ClusterPartition> partition;  // set iff the matrix admits one
  std::vector<PssViolation> violations;       // orthogonality failures between clusters
  bool too_many_clusters = false;             // more than k parallel classes
};

/// Greedy row clustering: each nonzero row joins an existing cluster if
/// parallel to its representative, else opens a new one. The matrix can be
/// rotated to perfect simple structure iff `partition` is set.
PssAnalysis pss_analyze(const Mat& a, const StructureTols& tol = {});

/// Convenience wrapper around pss_analyze.
std::optional<ClusterPartition> pss_partition(const Mat& a, const StructureTols& tol = {});

/// Orthogonal T such that A T has at most one nonzero entry per row, built
/// from the partition's representatives: T = S^T with the normalized
/// representatives as the first rows of S, completed to an orthogonal basis.
Mat pss_rotation(const Mat& a, const ClusterPartition& partition,
                 const StructureTols& tol = {});

// Zero-pattern summary of a loading matrix: for every column pair, how many
// rows vanish in exactly one of the two columns (gamma counts the minimum
// over pairs) and in both (delta, again the minimum).
struct ThurstonePairCount {
  int col_u = 0;
  int col_v = 0;
  int zero_in_exactly_one = 0;
  int zero_in_both = 0;
};

struct ThurstoneReport {
  int gamma = 0;  // min over pairs of zero_in_exactly_one
  int delta = 0;  // min over pairs of zero_in_both
  bool every_row_has_zero = false;        // each row at least one zero
  bool every_column_has_k_zeros = false;  // each column at least k zeros
  std::vector<ThurstonePairCount> per_pair;
};

ThurstoneReport thurstone_report(const Mat& lambda, double zero_tol);

/// f(a_u, a_v) = sum_i a_iu a_iv ((a_iu^2 - a_iv^2) - (omega/p)(||a_u||^2 - ||a_v||^2)):
/// the (u,v) entry of skew(grad Q)/4 at T = I. The identity is a stationary
/// rotation of A iff this vanishes for every column pair.
double identity_stationarity_residual(const Mat& a, const OrthomaxSpec& spec,
                                      Eigen::Index u, Eigen::Index v);

}  // namespace orthorot
