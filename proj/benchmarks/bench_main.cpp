// Microbenchmarks for the hot paths: criterion evaluation, gradients, polar
// projection, polynomial system construction/evaluation, and the k=2 solve.

#include <complex>
#include <vector>

#include <benchmark/benchmark.h>

#include "orthorot/criterion.hpp"
#include "orthorot/gpa.hpp"
#include "orthorot/homotopy.hpp"
#include "orthorot/matrix.hpp"
#include "orthorot/polysys.hpp"
#include "orthorot/rng.hpp"
#include "orthorot/simulation.hpp"

using namespace orthorot;

namespace {

Mat bench_matrix(Eigen::Index rows, Eigen::Index cols) {
  RngStream rng(17, 0, 0xbe);
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.uniform_sym();
  }
  return m;
}

void BM_criterion_value(benchmark::State& state) {
  const Mat& a = study_matrices().a_orthogonal;
  const OrthomaxSpec spec = OrthomaxSpec::varimax(9, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(orthomax_value(a, spec));
  }
}
BENCHMARK(BM_criterion_value);

void BM_criterion_gradient(benchmark::State& state) {
  const Mat& a = study_matrices().a_orthogonal;
  const OrthomaxSpec spec = OrthomaxSpec::varimax(9, 3);
  const Mat t = Mat::Identity(3, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(orthomax_gradient(a, t, spec));
  }
}
BENCHMARK(BM_criterion_gradient);

void BM_polar_factor(benchmark::State& state) {
  const Mat m = bench_matrix(3, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(svd_polar_factor(m));
  }
}
BENCHMARK(BM_polar_factor);

void BM_system_build_k3(benchmark::State& state) {
  const Mat& a = study_matrices().a_orthogonal;
  const OrthomaxSpec spec = OrthomaxSpec::varimax(9, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_stationarity_system(a, spec));
  }
}
BENCHMARK(BM_system_build_k3);

void BM_system_eval_k3(benchmark::State& state) {
  const PolySystem sys =
      build_stationarity_system(study_matrices().a_orthogonal, OrthomaxSpec::varimax(9, 3));
  std::vector<std::complex<double>> x(9);
  for (int i = 0; i < 9; ++i) x[static_cast<std::size_t>(i)] = {0.3 * i - 1.0, 0.1 * i};
  for (auto _ : state) {
    for (const auto& poly : sys.polys) {
      benchmark::DoNotOptimize(poly.eval(x.data()));
    }
  }
}
BENCHMARK(BM_system_eval_k3);

void BM_solve_k2(benchmark::State& state) {
  const Mat a = bench_matrix(5, 2);
  const PolySystem sys = build_stationarity_system(a, OrthomaxSpec::varimax(5, 2));
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_all(sys, 17));
  }
}
BENCHMARK(BM_solve_k2)->Unit(benchmark::kMillisecond);

void BM_gpa_study(benchmark::State& state) {
  const Mat& a = study_matrices().a_orthogonal;
  const OrthomaxSpec spec = OrthomaxSpec::varimax(9, 3);
  const Mat t0 = Mat::Identity(3, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gpa_rotate(a, spec, t0));
  }
}
BENCHMARK(BM_gpa_study)->Unit(benchmark::kMicrosecond);

void BM_orbit_distance_k3(benchmark::State& state) {
  const Mat l1 = bench_matrix(9, 3);
  const Mat l2 = bench_matrix(9, 3) * 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(orbit_distance(l1, l2));
  }
}
BENCHMARK(BM_orbit_distance_k3);

void BM_perturb_full(benchmark::State& state) {
  const StudyMatrices& sm = study_matrices();
  for (auto _ : state) {
    benchmark::DoNotOptimize(perturb(sm.a_orthogonal, sm.s_schedule, 27, {17, 0, 0}));
  }
}
BENCHMARK(BM_perturb_full);

}  // namespace

BENCHMARK_MAIN();
