#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "orthorot/criterion.hpp"
#include "orthorot/gpa.hpp"
#include "orthorot/homotopy.hpp"
#include "orthorot/matrix.hpp"
#include "orthorot/rng.hpp"

namespace orthorot {

// The 9 x 3 study design: three clusters of parallel rows built from three
// base rows and per-row multipliers, perturbed cell by cell over 27 stages
// following one of two disruption orders.
enum class Schedule { S, W };
enum class BaseMatrix { printed, orthogonal };
enum class Engine { solver, gpa, both };

const char* to_string(Schedule s);
const char* to_string(Engine e);

struct StudyMatrices {
  Mat a_printed;     // base rows (.50,.40,.10), (.40,-.60,.40), (.33,-.24,.69)
  Mat a_orthogonal;  // same with the third cluster's last column sign-flipped
  Eigen::Matrix<int, 9, 3> s_schedule;  // disrupts cluster by cluster
  Eigen::Matrix<int, 9, 3> w_schedule;  // disrupts row by row
};

const StudyMatrices& study_matrices();

// Criterion selection by name; equamax/parsimax resolve omega from (p, k).
struct CriterionChoice {
  std::string name;  // quartimax | varimax | equamax | parsimax | omega=<x>
  OrthomaxSpec to_spec(Eigen::Index p, Eigen::Index k) const;
  static CriterionChoice parse(const std::string& name);
};

// Identifies the noise stream of one (schedule, replicate) cell; rows and
// stages get their own substreams so results do not depend on evaluation
// order or thread count.
struct PerturbStreams {
  std::uint64_t seed = 0;
  int schedule_id = 0;  // 0 = S, 1 = W
  int replicate = 0;
};

/// Adds U(-1,1) noise to every cell whose schedule entry is <= stage,
/// redrawing each row until its squared norm lies in [0, 1].
/// Throws std::runtime_error when a row exhausts its redraw budget (1e6).
Mat perturb(const Mat& a, const Eigen::Matrix<int, 9, 3>& schedule, int stage,
            const PerturbStreams& streams);

struct SimplicityCounts {
  int perfect_rows = 0;   // rows with at least k-1 entries below the threshold
  int moderate_rows = 0;  // rows with at least one entry below the threshold
  int zero_elements = 0;  // entries below the threshold
};

SimplicityCounts simplicity_metrics(const Mat& lambda, double threshold);

/// Orbit distance between two loading matrices: min over column permutations
/// and sign flips of the Frobenius distance.
double orbit_distance(const Mat& lambda1, const Mat& lambda2);

struct SimConfig {
  BaseMatrix base = BaseMatrix::orthogonal;
  std::vector<Schedule> schedules = {Schedule::S, Schedule::W};
  std::vector<int> stages;  // subset of 1..27; empty = all
  int replicates = 50;
  std::vector<CriterionChoice> criteria;  // empty = the four named ones
  std::uint64_t seed = 0;
  double zero_threshold = 0.1;
  Engine engine = Engine::gpa;
  bool orbit_nearest = false;  // orbit-invariant dist_nearest instead of raw
  int threads = 1;
  SolverOptions solver;
  GpaOptions gpa;
};

// One CSV record: one engine's result on one replicate. Fields that the
// engine does not produce stay unset and serialize as nan.
struct ReplicateRecord {
  Schedule schedule = Schedule::S;
  int stage = 0;
  std::string criterion;
  int replicate = 0;
  Engine engine = Engine::gpa;
  bool failed = false;
  double q_value = 0.0;
  SimplicityCounts counts;
  std::optional<double> dist_global;   // gpa under engine=both
  std::optional<double> dist_nearest;  // gpa under engine=both
  std::optional<int> n_max;            // solver rows: class label counts
  std::optional<int> n_min;
  std::optional<int> n_indet;
};

struct StageSummary {
  Schedule schedule = Schedule::S;
  int stage = 0;
  std::string criterion;
  int n_replicates = 0;
  int n_failed = 0;
  double mean_perfect_rows = 0.0;
  double mean_moderate_rows = 0.0;
  double mean_zero_elements = 0.0;
  std::optional<double> mean_dist_global;
  std::optional<double> mean_dist_nearest;
  std::optional<double> mean_n_max;
  std::optional<double> mean_n_min;
  std::optional<double> mean_n_indet;
};

struct SimResult {
  std::vector<ReplicateRecord> records;
  std::vector<StageSummary> summaries;
};

/// Runs the full protocol: for every (schedule, stage, criterion, replicate)
/// perturb the base, rotate with the requested engine(s), and record the
/// simplicity metrics; engine=both adds distance columns between the two.
/// Deterministic for a fixed config, independent of thread count.
SimResult run_simulation(const SimConfig& config);

}  // namespace orthorot
