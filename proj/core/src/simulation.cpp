#include "orthorot/simulation.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "orthorot/classifier.hpp"
#include "orthorot/polysys.hpp"

namespace orthorot {

namespace {

constexpr long kRedrawBudget = 1000000;
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::uint64_t pack_stream(int schedule_id, int replicate, int stage, int row) {
  return static_cast<std::uint64_t>(row) | (static_cast<std::uint64_t>(stage) << 4) |
         (static_cast<std::uint64_t>(schedule_id) << 9) |
         (static_cast<std::uint64_t>(replicate) << 10);
}

}  // namespace

const char* to_string(Schedule s) { return s == Schedule::S ? "S" : "W"; }

const char* to_string(Engine e) {
  switch (e) {
    case Engine::solver: return "solver";
    case Engine::gpa: return "gpa";
    default: return "both";
  }
}

const StudyMatrices& study_matrices() {
  static const StudyMatrices m = [] {
    StudyMatrices sm;
    const double bases[3][3] = {
        {0.50, 0.40, 0.10}, {0.40, -0.60, 0.40}, {0.33, -0.24, 0.69}};
    const double mult[3][3] = {{1.0, 1.1, 1.2}, {1.0, 1.2, 0.6}, {1.0, 1.2, 1.1}};
    sm.a_printed.resize(9, 3);
    for (int cluster = 0; cluster < 3; ++cluster) {
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
          sm.a_printed(3 * cluster + r, c) = bases[cluster][c] * mult[cluster][r];
        }
      }
    }
    // the printed base's third cluster is not orthogonal to the others
    // (row dots 0.138 and 0.552); flipping its last column's sign fixes that
    sm.a_orthogonal = sm.a_printed;
    for (int r = 6; r < 9; ++r) sm.a_orthogonal(r, 2) = -sm.a_orthogonal(r, 2);

    sm.s_schedule << 1, 4, 7,
                     10, 13, 16,
                     19, 22, 25,
                     2, 5, 8,
                     11, 14, 17,
                     20, 23, 26,
                     3, 6, 9,
                     12, 15, 18,
                     21, 24, 27;
    sm.w_schedule << 1, 2, 3,
                     4, 5, 6,
                     7, 8, 9,
                     10, 11, 12,
                     13, 14, 15,
                     16, 17, 18,
                     19, 20, 21,
                     22, 23, 24,
                     25, 26, 27;
    return sm;
  }();
  return m;
}

OrthomaxSpec CriterionChoice::to_spec(Eigen::Index p, Eigen::Index k) const {
  if (name == "quartimax") return OrthomaxSpec::quartimax(p, k);
  if (name == "varimax") return OrthomaxSpec::varimax(p, k);
  if (name == "equamax") return OrthomaxSpec::equamax(p, k);
  if (name == "parsimax") return OrthomaxSpec::parsimax(p, k);
  if (name.rfind("omega=", 0) == 0) {
    return OrthomaxSpec::custom(std::stod(name.substr(6)), p, k);
  }
  throw std::invalid_argument("unknown criterion '" + name + "'");
}

CriterionChoice CriterionChoice::parse(const std::string& name) {
  CriterionChoice c{name};
  if (name != "quartimax" && name != "varimax" && name != "equamax" && name != "parsimax" &&
      name.rfind("omega=", 0) != 0) {
    throw std::invalid_argument("unknown criterion '" + name + "'");
  }
  if (name.rfind("omega=", 0) == 0) std::stod(name.substr(6));  // validates
  return c;
}

Mat perturb(const Mat& a, const Eigen::Matrix<int, 9, 3>& schedule, int stage,
            const PerturbStreams& streams) {
  if (a.rows() != 9 || a.cols() != 3) {
    throw std::invalid_argument("perturb: expected the 9 x 3 study shape");
  }
  if (stage < 0 || stage > 27) {
    throw std::invalid_argument("perturb: stage must lie in 0..27");
  }
  Mat out = a;
  for (int i = 0; i < 9; ++i) {
    bool any_active = false;
    for (int j = 0; j < 3; ++j) any_active = any_active || schedule(i, j) <= stage;
    if (!any_active) continue;

    RngStream rng(streams.seed, pack_stream(streams.schedule_id, streams.replicate, stage, i),
                  rng_domain::simulation);
    long attempts = 0;
    while (true) {
      if (++attempts > kRedrawBudget) {
        throw std::runtime_error("perturb: row " + std::to_string(i + 1) +
                                 " exhausted its redraw budget");
      }
      double sq = 0.0;
      double row[3];
      for (int j = 0; j < 3; ++j) {
        row[j] = a(i, j) + (schedule(i, j) <= stage ? rng.uniform_sym() : 0.0);
        sq += row[j] * row[j];
      }
      if (sq <= 1.0) {
        for (int j = 0; j < 3; ++j) out(i, j) = row[j];
        break;
      }
    }
  }
  return out;
}

SimplicityCounts simplicity_metrics(const Mat& lambda, double threshold) {
  require_finite(lambda, "simplicity_metrics input");
  SimplicityCounts out;
  const Eigen::Index k = lambda.cols();
  for (Eigen::Index i = 0; i < lambda.rows(); ++i) {
    int small = 0;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (std::abs(lambda(i, j)) < threshold) ++small;
    }
    out.zero_elements += small;
    if (small >= 1) ++out.moderate_rows;
    if (small >= static_cast<int>(k) - 1) ++out.perfect_rows;
  }
  return out;
}

double orbit_distance(const Mat& lambda1, const Mat& lambda2) {
  return column_orbit_distance(lambda1, lambda2);
}

namespace {

struct Job {
  Schedule schedule;
  int schedule_id;
  int stage;
  CriterionChoice criterion;
  int replicate;
};

struct JobOut {
  std::optional<ReplicateRecord> gpa_row;
  std::optional<ReplicateRecord> solver_row;
};

JobOut run_job(const SimConfig& config, const Mat& base,
               const Eigen::Matrix<int, 9, 3>& schedule_matrix, const Job& job) {
  JobOut out;
  const bool want_gpa = config.engine != Engine::solver;
  const bool want_solver = config.engine != Engine::gpa;

  ReplicateRecord proto;
  proto.schedule = job.schedule;
  proto.stage = job.stage;
  proto.criterion = job.criterion.name;
  proto.replicate = job.replicate;

  Mat a;
  try {
    a = perturb(base, schedule_matrix, job.stage,
                PerturbStreams{config.seed, job.schedule_id, job.replicate});
  } catch (const std::exception&) {
    if (want_gpa) {
      out.gpa_row = proto;
      out.gpa_row->engine = Engine::gpa;
      out.gpa_row->failed = true;
    }
    if (want_solver) {
      out.solver_row = proto;
      out.solver_row->engine = Engine::solver;
      out.solver_row->failed = true;
    }
    return out;
  }
  const OrthomaxSpec spec = job.criterion.to_spec(a.rows(), a.cols());

  std::optional<StationarySet> set;
  if (want_solver) {
    ReplicateRecord rec = proto;
    rec.engine = Engine::solver;
    try {
      set = solve_all(build_stationarity_system(a, spec), config.seed, config.solver);
      if (set->points.empty()) {
        rec.failed = true;
      } else {
        const auto& cls = set->classes[static_cast<std::size_t>(set->global_class)];
        const auto& rep = set->points[static_cast<std::size_t>(cls.representative)];
        rec.q_value = rep.q_value;
        rec.counts = simplicity_metrics(rep.lambda, config.zero_threshold);
        const ClassifiedSet labels = classify_set(*set, a, spec);
        rec.n_max = labels.n_max;
        rec.n_min = labels.n_min;
        rec.n_indet = labels.n_indet;
      }
    } catch (const std::exception&) {
      rec.failed = true;
      set.reset();
    }
    out.solver_row = std::move(rec);
  }

  if (want_gpa) {
    ReplicateRecord rec = proto;
    rec.engine = Engine::gpa;
    try {
      // a non-converged run still returns a feasible rotation worth measuring;
      // failed marks only thrown errors
      const GpaResult g = gpa_rotate(a, spec, Mat::Identity(a.cols(), a.cols()), config.gpa);
      rec.q_value = g.candidate.q_value;
      rec.counts = simplicity_metrics(g.candidate.lambda, config.zero_threshold);
      if (set && !set->points.empty()) {
        const auto& cls = set->classes[static_cast<std::size_t>(set->global_class)];
        const auto& rep = set->points[static_cast<std::size_t>(cls.representative)];
        rec.dist_global = orbit_distance(g.candidate.lambda, rep.lambda);
        double nearest = std::numeric_limits<double>::infinity();
        for (const auto& pt : set->points) {
          const double d = config.orbit_nearest
                               ? orbit_distance(g.candidate.lambda, pt.lambda)
                               : (g.candidate.lambda - pt.lambda).norm();
          nearest = std::min(nearest, d);
        }
        rec.dist_nearest = nearest;
      }
    } catch (const std::exception&) {
      rec.failed = true;
    }
    out.gpa_row = std::move(rec);
  }
  return out;
}

}  // namespace

SimResult run_simulation(const SimConfig& config) {
  if (config.replicates < 1) {
    throw std::invalid_argument("run_simulation: need at least one replicate");
  }
  const StudyMatrices& m = study_matrices();
  const Mat& base = config.base == BaseMatrix::printed ? m.a_printed : m.a_orthogonal;

  std::vector<int> stages = config.stages;
  if (stages.empty()) {
    for (int s = 1; s <= 27; ++s) stages.push_back(s);
  }
  for (int s : stages) {
    if (s < 1 || s > 27) throw std::invalid_argument("run_simulation: stages must lie in 1..27");
  }
  std::vector<CriterionChoice> criteria = config.criteria;
  if (criteria.empty()) {
    criteria = {CriterionChoice{"quartimax"}, CriterionChoice{"varimax"},
                CriterionChoice{"equamax"}, CriterionChoice{"parsimax"}};
  }

  std::vector<Job> jobs;
  for (Schedule schedule : config.schedules) {
    const int sid = schedule == Schedule::S ? 0 : 1;
    for (int stage : stages) {
      for (const auto& crit : criteria) {
        for (int rep = 0; rep < config.replicates; ++rep) {
          jobs.push_back(Job{schedule, sid, stage, crit, rep});
        }
      }
    }
  }

  std::vector<JobOut> results(jobs.size());
  const int n_threads = std::max(1, config.threads);
  if (n_threads == 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      const auto& sched = jobs[i].schedule_id == 0 ? m.s_schedule : m.w_schedule;
      results[i] = run_job(config, base, sched, jobs[i]);
    }
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= jobs.size()) return;
        const auto& sched = jobs[i].schedule_id == 0 ? m.s_schedule : m.w_schedule;
        results[i] = run_job(config, base, sched, jobs[i]);
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  SimResult out;
  for (const auto& r : results) {
    if (r.gpa_row) out.records.push_back(*r.gpa_row);
    if (r.solver_row) out.records.push_back(*r.solver_row);
  }

  // one summary per (schedule, stage, criterion), in job construction order
  for (Schedule schedule : config.schedules) {
    for (int stage : stages) {
      for (const auto& crit : criteria) {
        StageSummary s;
        s.schedule = schedule;
        s.stage = stage;
        s.criterion = crit.name;
        s.n_replicates = config.replicates;
        const Engine metrics_engine = config.engine == Engine::gpa ? Engine::gpa : Engine::solver;
        double sp = 0, sm2 = 0, sz = 0;
        int nm = 0;
        double sdg = 0, sdn = 0;
        int nd = 0;
        double smax = 0, smin = 0, sind = 0;
        int nc = 0;
        for (const auto& rec : out.records) {
          if (rec.schedule != schedule || rec.stage != stage || rec.criterion != crit.name) {
            continue;
          }
          if (rec.failed) {
            ++s.n_failed;
            continue;
          }
          if (rec.engine == metrics_engine) {
            sp += rec.counts.perfect_rows;
            sm2 += rec.counts.moderate_rows;
            sz += rec.counts.zero_elements;
            ++nm;
          }
          if (rec.dist_global) {
            sdg += *rec.dist_global;
            sdn += *rec.dist_nearest;
            ++nd;
          }
          if (rec.n_max) {
            smax += *rec.n_max;
            smin += *rec.n_min;
            sind += *rec.n_indet;
            ++nc;
          }
        }
        s.mean_perfect_rows = nm ? sp / nm : kNan;
        s.mean_moderate_rows = nm ? sm2 / nm : kNan;
        s.mean_zero_elements = nm ? sz / nm : kNan;
        if (nd) {
          s.mean_dist_global = sdg / nd;
          s.mean_dist_nearest = sdn / nd;
        }
        if (nc) {
          s.mean_n_max = smax / nc;
          s.mean_n_min = smin / nc;
          s.mean_n_indet = sind / nc;
        }
        out.summaries.push_back(std::move(s));
      }
    }
  }
  return out;
}

}  // namespace orthorot
