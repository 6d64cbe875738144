#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "orthorot/simulation.hpp"
#include "orthorot/structure.hpp"
#include "support/test_util.hpp"

using namespace orthorot;

namespace {

bool records_equal(const ReplicateRecord& x, const ReplicateRecord& y) {
  return x.schedule == y.schedule && x.stage == y.stage && x.criterion == y.criterion &&
         x.replicate == y.replicate && x.engine == y.engine && x.failed == y.failed &&
         x.q_value == y.q_value && x.counts.perfect_rows == y.counts.perfect_rows &&
         x.counts.moderate_rows == y.counts.moderate_rows &&
         x.counts.zero_elements == y.counts.zero_elements &&
         x.dist_global == y.dist_global && x.dist_nearest == y.dist_nearest &&
         x.n_max == y.n_max && x.n_min == y.n_min && x.n_indet == y.n_indet;
}

}  // namespace

TEST_SUITE("simulation") {

TEST_CASE("study matrices are the cluster products") {
  const StudyMatrices& m = study_matrices();
  REQUIRE(m.a_printed.rows() == 9);
  REQUIRE(m.a_printed.cols() == 3);

  const double bases[3][3] = {
      {0.50, 0.40, 0.10}, {0.40, -0.60, 0.40}, {0.33, -0.24, 0.69}};
  const double mult[3][3] = {{1.0, 1.1, 1.2}, {1.0, 1.2, 0.6}, {1.0, 1.2, 1.1}};
  for (int cluster = 0; cluster < 3; ++cluster) {
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        CHECK(m.a_printed(3 * cluster + r, c) ==
              doctest::Approx(bases[cluster][c] * mult[cluster][r]).epsilon(1e-15));
      }
    }
  }

  // the corrected variant differs only in the third cluster's last column
  CHECK((m.a_orthogonal.topRows(6) - m.a_printed.topRows(6)).norm() == 0.0);
  for (int r = 6; r < 9; ++r) {
    CHECK(m.a_orthogonal(r, 2) == -m.a_printed(r, 2));
    CHECK(m.a_orthogonal(r, 0) == m.a_printed(r, 0));
    CHECK(m.a_orthogonal(r, 1) == m.a_printed(r, 1));
  }

  // cross-cluster rows of the corrected base are orthogonal
  for (int r1 = 0; r1 < 9; ++r1) {
    for (int r2 = r1 + 1; r2 < 9; ++r2) {
      if (r1 / 3 == r2 / 3) continue;
      CHECK(std::abs(m.a_orthogonal.row(r1).dot(m.a_orthogonal.row(r2))) < 1e-15);
    }
  }
}

TEST_CASE("each schedule visits every cell exactly once") {
  const StudyMatrices& m = study_matrices();
  for (const auto* sched : {&m.s_schedule, &m.w_schedule}) {
    std::vector<int> seen;
    for (int i = 0; i < 9; ++i) {
      for (int j = 0; j < 3; ++j) seen.push_back((*sched)(i, j));
    }
    std::sort(seen.begin(), seen.end());
    for (int v = 1; v <= 27; ++v) CHECK(seen[v - 1] == v);
  }
  // W walks the matrix row by row; S finishes a cluster before moving on
  CHECK(m.w_schedule(0, 0) == 1);
  CHECK(m.w_schedule(0, 2) == 3);
  CHECK(m.w_schedule(8, 2) == 27);
  CHECK(m.s_schedule(0, 0) == 1);
  CHECK(m.s_schedule(3, 0) == 2);  // second cluster's first row is stage 2
  CHECK(m.s_schedule(6, 0) == 3);
}

TEST_CASE("stage zero leaves the base untouched") {
  const StudyMatrices& m = study_matrices();
  const Mat out = perturb(m.a_orthogonal, m.s_schedule, 0, {42, 0, 0});
  CHECK((out - m.a_orthogonal).norm() == 0.0);
}

TEST_CASE("perturbation is deterministic and cell scoped") {
  const StudyMatrices& m = study_matrices();
  const PerturbStreams streams{42, 1, 3};
  const Mat x = perturb(m.a_orthogonal, m.w_schedule, 9, streams);
  const Mat y = perturb(m.a_orthogonal, m.w_schedule, 9, streams);
  CHECK((x - y).norm() == 0.0);

  // stage 9 of W touches only the first three rows
  CHECK((x.bottomRows(6) - m.a_orthogonal.bottomRows(6)).norm() == 0.0);
  CHECK((x.topRows(3) - m.a_orthogonal.topRows(3)).norm() > 0.0);

  // a different replicate draws different noise
  const Mat z = perturb(m.a_orthogonal, m.w_schedule, 9, {42, 1, 4});
  CHECK((x - z).norm() > 0.0);
}

TEST_CASE("perturbed rows stay inside the unit ball") {
  const StudyMatrices& m = study_matrices();
  for (int replicate = 0; replicate < 20; ++replicate) {
    const Mat out = perturb(m.a_orthogonal, m.s_schedule, 27, {7, 0, replicate});
    for (int i = 0; i < 9; ++i) {
      CHECK(out.row(i).squaredNorm() <= 1.0);
    }
  }
}

TEST_CASE("perturb validates its inputs") {
  const StudyMatrices& m = study_matrices();
  CHECK_THROWS_AS(perturb(Mat::Zero(4, 2), m.s_schedule, 1, {1, 0, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(perturb(m.a_orthogonal, m.s_schedule, -1, {1, 0, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(perturb(m.a_orthogonal, m.s_schedule, 28, {1, 0, 0}),
                  std::invalid_argument);
}

TEST_CASE("simplicity counts on a published rotation") {
  // global-optimum loadings of the W run at stage 9, entries as displayed to
  // two decimals with the below-threshold cells at zero
  Mat lambda(9, 3);
  lambda << 0.12, -0.40, -0.79,
           -0.12, 0.29, 0.52,
            0.74, -0.54, -0.79,
           -0.82, 0.00, 0.00,
           -0.99, 0.00, 0.00,
           -0.49, 0.00, 0.00,
            0.00, 0.00, -0.79,
            0.00, 0.11, -0.95,
            0.00, 0.10, -0.87;
  const SimplicityCounts c = simplicity_metrics(lambda, 0.1);
  CHECK(c.perfect_rows == 4);
  CHECK(c.moderate_rows == 6);
  CHECK(c.zero_elements == 10);
}

TEST_CASE("an exact simple structure counts as all perfect") {
  const PssAnalysis an = pss_analyze(study_matrices().a_orthogonal);
  REQUIRE(an.partition.has_value());
  const Mat t = pss_rotation(study_matrices().a_orthogonal, *an.partition);
  const SimplicityCounts c = simplicity_metrics(study_matrices().a_orthogonal * t, 0.1);
  CHECK(c.perfect_rows == 9);
  CHECK(c.moderate_rows == 9);
  CHECK(c.zero_elements == 18);
}

TEST_CASE("orbit distance ignores column signs and order") {
  const Mat l1 = testutil::random_matrix(88, 0, 7, 3);
  Mat g = Mat::Zero(3, 3);
  g(0, 1) = -1.0;
  g(1, 2) = 1.0;
  g(2, 0) = -1.0;
  CHECK(orbit_distance(l1, l1 * g) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(orbit_distance(l1, l1) == 0.0);

  Mat l2 = l1;
  l2(0, 0) += 0.25;
  const double d = orbit_distance(l1, l2);
  CHECK(d > 0.0);
  CHECK(d <= doctest::Approx(0.25));
  CHECK(orbit_distance(l1 * g, l2 * g) == doctest::Approx(d).epsilon(1e-12));
}

TEST_CASE("criterion choices parse by name") {
  CHECK(CriterionChoice::parse("varimax").to_spec(9, 3).omega == 1.0);
  CHECK(CriterionChoice::parse("quartimax").to_spec(9, 3).omega == 0.0);
  CHECK(CriterionChoice::parse("equamax").to_spec(9, 3).omega == 1.5);
  CHECK(CriterionChoice::parse("parsimax").to_spec(9, 3).omega ==
        doctest::Approx(1.8).epsilon(1e-15));
  CHECK(CriterionChoice::parse("omega=0.25").to_spec(9, 3).omega == 0.25);
  CHECK_THROWS_AS(CriterionChoice::parse("oblimin"), std::invalid_argument);
  CHECK_THROWS_AS(CriterionChoice::parse("omega=abc"), std::invalid_argument);
}

TEST_CASE("a small run is deterministic across thread counts") {
  SimConfig cfg;
  cfg.base = BaseMatrix::orthogonal;
  cfg.schedules = {Schedule::S};
  cfg.stages = {1, 9};
  cfg.replicates = 2;
  cfg.criteria = {CriterionChoice::parse("varimax"), CriterionChoice::parse("quartimax")};
  cfg.seed = 7;
  cfg.engine = Engine::gpa;

  cfg.threads = 1;
  const SimResult r1 = run_simulation(cfg);
  cfg.threads = 2;
  const SimResult r2 = run_simulation(cfg);

  REQUIRE(r1.records.size() == 8);  // 2 stages x 2 criteria x 2 replicates
  REQUIRE(r1.records.size() == r2.records.size());
  for (std::size_t i = 0; i < r1.records.size(); ++i) {
    CHECK(records_equal(r1.records[i], r2.records[i]));
  }

  REQUIRE(r1.summaries.size() == 4);
  for (const StageSummary& s : r1.summaries) {
    CHECK(s.n_replicates == 2);
    CHECK(s.n_failed == 0);
    CHECK(s.mean_perfect_rows >= 0.0);
    CHECK(s.mean_perfect_rows <= 9.0);
    CHECK_FALSE(s.mean_dist_global.has_value());
  }

  // gpa rows carry no class counts
  for (const ReplicateRecord& rec : r1.records) {
    CHECK(rec.engine == Engine::gpa);
    CHECK_FALSE(rec.n_max.has_value());
    CHECK_FALSE(rec.dist_global.has_value());
  }
}

TEST_CASE("the enumerating engine recovers a near-perfect stage-one structure"
          * doctest::timeout(120)) {
  SimConfig cfg;
  cfg.base = BaseMatrix::orthogonal;
  cfg.schedules = {Schedule::S};
  cfg.stages = {1};
  cfg.replicates = 1;
  cfg.criteria = {CriterionChoice::parse("quartimax")};
  cfg.seed = 42;
  cfg.engine = Engine::solver;

  const SimResult r = run_simulation(cfg);
  REQUIRE(r.records.size() == 1);
  const ReplicateRecord& rec = r.records[0];
  CHECK_FALSE(rec.failed);
  CHECK(rec.engine == Engine::solver);
  REQUIRE(rec.n_max.has_value());
  CHECK(*rec.n_max >= 1);
  // one perturbed cell barely moves the nine-row cluster structure
  CHECK(rec.counts.perfect_rows >= 8);
  CHECK(rec.counts.zero_elements >= 16);
}

}  // TEST_SUITE
