#include "doctest.h"

#include <cmath>

#include "orthorot/classifier.hpp"
#include "orthorot/polysys.hpp"
#include "orthorot/simulation.hpp"
#include "support/test_util.hpp"

using namespace orthorot;

namespace {

// frozen stationary rotations of the sign-corrected study base under varimax
Mat frozen_max_t() {
  Mat t(3, 3);
  t << -0.77151674981102303, -0.41166465371114325, -0.48507125007268964,
      -0.61721339984827095, 0.29939247542632547, 0.72760687510901156,
      -0.15430334996183037, 0.86075336684999815, -0.48507125007276319;
  return t;
}

Mat frozen_saddle_t() {
  Mat t(3, 3);
  t << -0.88854189587499877, -0.20254755530496324, -0.4116646537108159,
      0.078059974955541733, -0.95093153589951129, 0.29939247542604785,
      -0.45210611540301388, 0.23388822516702146, 0.86075336684988768;
  return t;
}

Mat frozen_min_t() {
  Mat t(3, 3);
  t << -0.63486771000482112, -0.57474143392453325, -0.51634801725542223,
      0.73116246753664349, -0.23094969199719786, -0.64192186894677927,
      0.24968867987748466, -0.78506975734438456, 0.56685186710839019;
  return t;
}

Mat fd_lagrangian_hessian(const Mat& a, const OrthomaxSpec& spec, const Mat& t,
                          const Vec& mu, double h) {
  const int n = static_cast<int>(t.rows() * t.cols());
  const auto lagrangian_grad = [&](const Mat& tt) {
    Mat g = orthomax_gradient(a, tt, spec);
    // constraint part: sum_{j<=l} mu_jl d(T^T T - I)_jl
    const Mat b = constraint_jacobian(tt);
    Vec flat(n);
    for (Eigen::Index u = 0; u < tt.rows(); ++u) {
      for (Eigen::Index v = 0; v < tt.cols(); ++v) {
        flat[u * tt.cols() + v] = g(u, v);
      }
    }
    return Vec(flat + b.transpose() * mu);
  };
  Mat hess(n, n);
  for (int col = 0; col < n; ++col) {
    Mat tp = t, tm = t;
    tp(col / t.cols(), col % t.cols()) += h;
    tm(col / t.cols(), col % t.cols()) -= h;
    hess.col(col) = (lagrangian_grad(tp) - lagrangian_grad(tm)) / (2.0 * h);
  }
  return hess;
}

}  // namespace

TEST_SUITE("classifier") {

TEST_CASE("k=1 multiplier is minus twice the criterion") {
  const Mat a = testutil::random_matrix(71, 0, 6, 1);
  const OrthomaxSpec spec = OrthomaxSpec::custom(0.4, 6, 1);
  const auto [mu, residual] = recover_multipliers(a, spec, Mat::Identity(1, 1));
  CHECK(residual < 1e-12);
  REQUIRE(mu.size() == 1);
  CHECK(mu[0] == doctest::Approx(-2.0 * orthomax_value(a, spec)).epsilon(1e-12));
}

TEST_CASE("zero loadings give zero multipliers") {
  const Mat a = Mat::Zero(5, 2);
  const auto [mu, residual] = recover_multipliers(a, OrthomaxSpec::varimax(5, 2),
                                                  Mat::Identity(2, 2));
  CHECK(residual == doctest::Approx(0.0));
  CHECK(mu.norm() == doctest::Approx(0.0));
}

TEST_CASE("frozen solver outputs recover small residuals") {
  const Mat& a = study_matrices().a_orthogonal;
  const OrthomaxSpec spec = OrthomaxSpec::varimax(9, 3);
  for (const Mat& t : {frozen_max_t(), frozen_saddle_t(), frozen_min_t()}) {
    const auto [mu, residual] = recover_multipliers(a, spec, t);
    CHECK(residual < 1e-6);
  }
}

TEST_CASE("constraint jacobian at the identity") {
  const Mat b = constraint_jacobian(Mat::Identity(3, 3));
  REQUIRE(b.rows() == 6);
  REQUIRE(b.cols() == 9);
  // diagonal constraints (j,j) differentiate t_jj^2 - 1: single entry 2
  // constraint order (1,1),(1,2),(1,3),(2,2),(2,3),(3,3); variables row-major
  const int diag_rows[3] = {0, 3, 5};
  const int diag_vars[3] = {0, 4, 8};
  for (int j = 0; j < 3; ++j) {
    for (int c = 0; c < 9; ++c) {
      CHECK(b(diag_rows[j], c) == doctest::Approx(c == diag_vars[j] ? 2.0 : 0.0));
    }
  }
}

TEST_CASE("lagrangian hessian matches finite differences") {
  const Mat& a = study_matrices().a_orthogonal;
  const OrthomaxSpec spec = OrthomaxSpec::varimax(9, 3);
  const Mat t = frozen_max_t();
  const auto [mu, residual] = recover_multipliers(a, spec, t);
  REQUIRE(residual < 1e-6);
  const Mat h = lagrangian_hessian(a, spec, t, mu);
  const Mat fd = fd_lagrangian_hessian(a, spec, t, mu, 1e-5);
  CHECK((h - fd).norm() / fd.norm() < 1e-5);
  CHECK((h - h.transpose()).norm() < 1e-12);
}

TEST_CASE("bordered blocks are symmetric and sized by the border index") {
  const Mat& a = study_matrices().a_orthogonal;
  const OrthomaxSpec spec = OrthomaxSpec::varimax(9, 3);
  const Mat t = frozen_min_t();
  const auto [mu, residual] = recover_multipliers(a, spec, t);
  for (int b = 7; b <= 9; ++b) {
    const Mat hb = bordered_hessian(a, spec, t, mu, b);
    CHECK(hb.rows() == b + 6);
    CHECK((hb - hb.transpose()).norm() < 1e-12);
  }
  CHECK_THROWS_AS(bordered_hessian(a, spec, t, mu, 6), std::invalid_argument);
  CHECK_THROWS_AS(bordered_hessian(a, spec, t, mu, 10), std::invalid_argument);
}

TEST_CASE("frozen stationary rotations keep their labels") {
  const Mat& a = study_matrices().a_orthogonal;
  const OrthomaxSpec spec = OrthomaxSpec::varimax(9, 3);
  const ClassifiedPoint top = classify_point(a, spec, frozen_max_t());
  CHECK(top.label == StationLabel::max);
  CHECK(top.determinant_trail.size() == 3);
  const ClassifiedPoint saddle = classify_point(a, spec, frozen_saddle_t());
  CHECK(saddle.label == StationLabel::indeterminate);
  const ClassifiedPoint bottom = classify_point(a, spec, frozen_min_t());
  CHECK(bottom.label == StationLabel::min);
  CHECK(bottom.label != StationLabel::max);
}

TEST_CASE("non-stationary input is rejected") {
  const Mat& a = study_matrices().a_orthogonal;
  CHECK_THROWS_AS(classify_point(a, OrthomaxSpec::varimax(9, 3), Mat::Identity(3, 3)),
                  std::invalid_argument);
}

TEST_CASE("k=1 classification degenerates to indeterminate") {
  Mat a(1, 1);
  a << 1.0;
  const ClassifiedPoint c = classify_point(a, OrthomaxSpec::quartimax(1, 1),
                                           Mat::Identity(1, 1));
  CHECK(c.label == StationLabel::indeterminate);
  CHECK(c.determinant_trail.empty());
}

TEST_CASE("set classification tallies the class labels") {
  const Mat a = testutil::random_matrix(29, 0, 5, 2);
  const OrthomaxSpec spec = OrthomaxSpec::varimax(5, 2);
  const StationarySet set = solve_all(build_stationarity_system(a, spec), 29);
  REQUIRE_FALSE(set.classes.empty());
  const ClassifiedSet cs = classify_set(set, a, spec);
  REQUIRE(cs.points.size() == set.points.size());
  REQUIRE(cs.class_labels.size() == set.classes.size());
  CHECK(cs.n_max + cs.n_min + cs.n_indet == static_cast<int>(set.classes.size()));
  CHECK(cs.n_max >= 1);
  CHECK(cs.class_labels[static_cast<std::size_t>(set.global_class)] == StationLabel::max);
  // members of one orbit share their representative's label
  for (std::size_t c = 0; c < set.classes.size(); ++c) {
    for (int member : set.classes[c].members) {
      CHECK(cs.points[static_cast<std::size_t>(member)].label == cs.class_labels[c]);
    }
  }
}

TEST_CASE("labels are orbit invariant") {
  const Mat& a = study_matrices().a_orthogonal;
  const OrthomaxSpec spec = OrthomaxSpec::varimax(9, 3);
  const Mat t = frozen_max_t();
  Mat g = Mat::Zero(3, 3);
  g(0, 2) = -1.0;
  g(1, 0) = 1.0;
  g(2, 1) = -1.0;
  CHECK(classify_point(a, spec, t * g).label == StationLabel::max);
}

}  // TEST_SUITE
