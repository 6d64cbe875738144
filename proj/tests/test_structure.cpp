#include "doctest.h"

#include <cmath>

#include "orthorot/simulation.hpp"
#include "orthorot/structure.hpp"
#include "support/test_util.hpp"

using namespace orthorot;

namespace {

// p=6, k=3 zero pattern whose only free pair sits in row 6, columns 1 and 2
Mat thurstone_pattern_fixture() {
  Mat a(6, 3);
  a << 0.0, 0.7, 0.4,
      0.0, 0.6, -0.5,
      0.8, 0.0, 0.0,
      -0.6, 0.0, 0.0,
      0.0, 0.0, 0.9,
      0.5, 0.3, 0.0;
  return a;
}

}  // namespace

TEST_SUITE("structure") {

TEST_CASE("an already perfect matrix partitions by column") {
  Mat a(5, 3);
  a << 0.7, 0.0, 0.0, -0.5, 0.0, 0.0, 0.0, 0.8, 0.0, 0.0, 0.0, 0.6, 0.0, 0.0, -0.9;
  const auto part = pss_partition(a);
  REQUIRE(part.has_value());
  CHECK(part->cluster_count == 3);
  CHECK(part->assignments[0] == part->assignments[1]);
  CHECK(part->assignments[2] != part->assignments[0]);
  CHECK(part->assignments[3] == part->assignments[4]);
}

TEST_CASE("the printed study base fails with its two known dot products") {
  const PssAnalysis analysis = pss_analyze(study_matrices().a_printed);
  CHECK_FALSE(analysis.partition.has_value());
  CHECK_FALSE(analysis.too_many_clusters);
  REQUIRE(analysis.violations.size() == 2);
  CHECK(analysis.violations[0].raw_dot == doctest::Approx(0.138).epsilon(1e-12));
  CHECK(analysis.violations[1].raw_dot == doctest::Approx(0.552).epsilon(1e-12));
}

TEST_CASE("the sign-corrected study base partitions into three clusters") {
  const auto part = pss_partition(study_matrices().a_orthogonal);
  REQUIRE(part.has_value());
  CHECK(part->cluster_count == 3);
}

TEST_CASE("existence is invariant under a signed column permutation") {
  const Mat& a = study_matrices().a_orthogonal;
  Mat g(3, 3);
  g << 0, -1, 0, 0, 0, 1, -1, 0, 0;
  CHECK(pss_partition(a * g).has_value());
  CHECK(pss_partition(a).has_value());
  const Mat& bad = study_matrices().a_printed;
  CHECK_FALSE(pss_partition(bad * g).has_value());
}

TEST_CASE("pss_rotation on a perfect matrix is a signed permutation") {
  Mat a(4, 2);
  a << 0.0, 0.7, 0.4, 0.0, 0.0, -0.2, 0.9, 0.0;
  const auto part = pss_partition(a);
  REQUIRE(part.has_value());
  const Mat t = pss_rotation(a, *part);
  CHECK(orthogonality_residual(t) < 1e-12);
  for (Eigen::Index i = 0; i < 2; ++i) {
    for (Eigen::Index j = 0; j < 2; ++j) {
      CHECK(std::min(std::abs(t(i, j)), std::abs(std::abs(t(i, j)) - 1.0)) < 1e-12);
    }
  }
  CHECK(column_orbit_distance(a * t, a) < 1e-12);
}

TEST_CASE("round trip recovers a hidden perfect structure") {
  Mat lambda0(7, 3);
  lambda0 = Mat::Zero(7, 3);
  lambda0(0, 0) = 0.8;
  lambda0(1, 0) = -0.6;
  lambda0(2, 1) = 0.55;
  lambda0(3, 1) = 0.2;
  lambda0(4, 2) = -0.75;
  lambda0(5, 2) = 0.3;
  lambda0(6, 0) = 0.45;
  const Mat t0 = testutil::random_orthogonal(31, 0, 3);
  const Mat a = lambda0 * t0.transpose();
  const auto part = pss_partition(a);
  REQUIRE(part.has_value());
  const Mat lambda = a * pss_rotation(a, *part);
  CHECK(column_orbit_distance(lambda, lambda0) < 1e-8);
}

TEST_CASE("rotated study base has one nonzero per row with row-norm magnitude") {
  const Mat& a = study_matrices().a_orthogonal;
  const auto part = pss_partition(a);
  REQUIRE(part.has_value());
  const Mat lambda = a * pss_rotation(a, *part);
  for (Eigen::Index i = 0; i < lambda.rows(); ++i) {
    int big = 0;
    for (Eigen::Index j = 0; j < lambda.cols(); ++j) {
      if (std::abs(lambda(i, j)) >= 1e-10) ++big;
    }
    CHECK(big == 1);
    CHECK(lambda.row(i).norm() == doctest::Approx(a.row(i).norm()).epsilon(1e-10));
  }
}

TEST_CASE("thurstone counts on an even perfect split") {
  Mat lambda = Mat::Zero(9, 3);
  for (int c = 0; c < 3; ++c) {
    for (int r = 0; r < 3; ++r) lambda(3 * c + r, c) = 0.5 + 0.1 * r;
  }
  const ThurstoneReport rep = thurstone_report(lambda, 0.1);
  CHECK(rep.gamma == 6);
  CHECK(rep.delta == 3);
  CHECK(rep.gamma + rep.delta == 9);
  CHECK(rep.every_row_has_zero);
  CHECK(rep.every_column_has_k_zeros);
}

TEST_CASE("thurstone counts vanish without zeros") {
  Mat lambda(4, 2);
  lambda << 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5;
  const ThurstoneReport rep = thurstone_report(lambda, 0.1);
  CHECK(rep.gamma == 0);
  CHECK(rep.delta == 0);
  CHECK_FALSE(rep.every_row_has_zero);
  CHECK_FALSE(rep.every_column_has_k_zeros);
}

TEST_CASE("thurstone pair counts match a brute-force count") {
  const Mat lambda = thurstone_pattern_fixture();
  const double tol = 1e-6;
  const ThurstoneReport rep = thurstone_report(lambda, tol);
  REQUIRE(rep.per_pair.size() == 3);
  for (const auto& pc : rep.per_pair) {
    int one = 0, both = 0;
    for (Eigen::Index i = 0; i < lambda.rows(); ++i) {
      const bool zu = std::abs(lambda(i, pc.col_u)) < tol;
      const bool zv = std::abs(lambda(i, pc.col_v)) < tol;
      if (zu && zv) ++both;
      else if (zu || zv) ++one;
    }
    CHECK(pc.zero_in_exactly_one == one);
    CHECK(pc.zero_in_both == both);
  }
  CHECK(rep.gamma == 2);
  CHECK(rep.delta == 0);
  CHECK(rep.every_row_has_zero);
  CHECK(rep.every_column_has_k_zeros);
}

TEST_CASE("identity residual vanishes on zero and perfect columns") {
  Mat zero = Mat::Zero(5, 2);
  CHECK(identity_stationarity_residual(zero, OrthomaxSpec::varimax(5, 2), 0, 1) ==
        doctest::Approx(0.0));
  Mat pss = Mat::Zero(6, 3);
  pss(0, 0) = 0.7;
  pss(1, 0) = 0.4;
  pss(2, 1) = -0.5;
  pss(3, 1) = 0.8;
  pss(4, 2) = 0.6;
  pss(5, 2) = 0.3;
  const OrthomaxSpec spec = OrthomaxSpec::varimax(6, 3);
  for (Eigen::Index u = 0; u < 3; ++u) {
    for (Eigen::Index v = 0; v < 3; ++v) {
      if (u == v) continue;
      CHECK(identity_stationarity_residual(pss, spec, u, v) == doctest::Approx(0.0));
    }
  }
}

TEST_CASE("a thurstone pattern short of perfect is generically not stationary") {
  const Mat a = thurstone_pattern_fixture();
  // only row 6 contributes to the (1,2) residual; the value is exact
  const double f = identity_stationarity_residual(a, OrthomaxSpec::varimax(6, 3), 0, 1);
  CHECK(std::abs(f) > 1e-6);
  CHECK(f == doctest::Approx(0.01625).epsilon(1e-12));
  const double f0 = identity_stationarity_residual(a, OrthomaxSpec::quartimax(6, 3), 0, 1);
  CHECK(f0 == doctest::Approx(0.024).epsilon(1e-12));
}

TEST_CASE("identity residual is antisymmetric in the column pair") {
  const Mat a = testutil::random_matrix(32, 0, 7, 3);
  const OrthomaxSpec spec = OrthomaxSpec::equamax(7, 3);
  for (Eigen::Index u = 0; u < 3; ++u) {
    for (Eigen::Index v = u + 1; v < 3; ++v) {
      const double f = identity_stationarity_residual(a, spec, u, v);
      const double g = identity_stationarity_residual(a, spec, v, u);
      CHECK(f == doctest::Approx(-g).epsilon(1e-12));
    }
  }
}

}  // TEST_SUITE
