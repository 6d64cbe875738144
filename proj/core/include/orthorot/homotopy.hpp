#pragma once

#include <cstdint>
#include <vector>

#include "orthorot/criterion.hpp"
#include "orthorot/matrix.hpp"
#include "orthorot/polysys.hpp"

namespace orthorot {

struct SolverOptions {
  double initial_step = 0.05;
  double max_step = 0.1;
  double min_step = 1e-12;        // below this the path is abandoned
  int corrector_iters = 3;        // Newton iterations per accepted step
  double corrector_tol = 1e-8;    // on the last Newton update, relative to |x|
  int success_streak = 4;         // accepted steps before the step doubles
  double divergence_threshold = 1e7;
  double endgame_tau = 1e-6;      // track to tau = 1 - endgame_tau, then polish
  double endpoint_tol = 1e-10;    // max residual of a converged endpoint
  double im_tol = 1e-8;           // max |Im| for an endpoint to count as real
  double dedup_tol = 1e-6;        // distance below which two solutions are one
  double rank_tol = 1e-8;         // min singular value; below = on a continuum
  int max_steps_per_path = 20000; // hard budget; exhausting it raises
  int polish_iters = 20;
  int threads = 1;
  bool keep_path_diagnostics = false;
};

enum class PathStatus { converged, diverged, truncated };

struct PathResult {
  CVec endpoint;
  PathStatus status = PathStatus::truncated;
  double final_residual = 0.0;        // |F| at the endpoint, inf-norm
  double jacobian_min_singular = 0.0; // of F' at the endpoint (converged paths)
  int steps = 0;
};

// Orbit class: solutions identified under column permutation and sign flips.
struct OrbitClass {
  std::vector<int> members;  // indices into StationarySet::points, sorted
  int representative = 0;    // first member
  double q_value = 0.0;
};

struct StationarySet {
  std::vector<RotationCandidate> points;  // real solutions, canonically ordered
  std::vector<OrbitClass> classes;        // sorted by descending q
  int global_class = 0;                   // index into classes of the max q
  bool continuum_flag = false;  // some endpoint had a rank-deficient Jacobian
  long n_paths_tracked = 0;
  int n_converged = 0;
  int n_diverged = 0;
  int n_truncated = 0;
  int n_rejected = 0;  // real endpoints that failed the residual gates
  std::vector<PathResult> path_diagnostics;  // kept on request only
};

/// Tracks every total-degree homotopy path of the system and returns all real
/// solutions, deduplicated, polished, canonically ordered and grouped into
/// orbit classes. Deterministic for a fixed seed, independent of thread count.
/// Throws std::runtime_error if any path exhausts its step budget,
/// std::invalid_argument for a non-square system.
StationarySet solve_all(const PolySystem& system, std::uint64_t seed,
                        const SolverOptions& opts = {});

struct PolishResult {
  Vec point;
  double residual = 0.0;  // |F| inf-norm at the returned point
  int iterations = 0;
  bool converged = false;
  bool rank_deficient = false;  // Jacobian numerically singular; not polished
};

/// Plain Newton refinement on the real system. Fails (rank_deficient) rather
/// than iterating with a numerically singular Jacobian.
PolishResult newton_polish(const PolySystem& system, const Vec& point,
                           int max_iter = 20, double tol = 1e-12);

/// Orbit-invariant representative of T: every T P D (P permutation, D signs)
/// maps to the same matrix. Columns are sorted by descending column norm of
/// A T (ties broken on the rounded |entries|), then each column's
/// largest-|entry| coordinate is made positive.
Mat canonicalize(const Mat& t, const Mat& a);

}  // namespace orthorot
