#include "orthorot/homotopy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "orthorot/rng.hpp"

namespace orthorot {

namespace {

using Cplx = std::complex<double>;

// ---- compiled evaluation ----------------------------------------------
// Terms are flattened to (coefficient, factor list) with per-point power
// tables shared across the residual and the whole Jacobian, which is where
// the tracker spends its time.

struct CTerm {
  double coef = 0.0;
  int nfac = 0;
  std::array<std::pair<std::uint8_t, std::uint8_t>, 4> fac{};  // (var, exp)
};

struct CPoly {
  std::vector<CTerm> terms;
};

struct CompiledSystem {
  int n = 0;
  int table_width = 0;  // max exponent + 1
  std::vector<CPoly> f;
  std::vector<CPoly> jac;  // n * n, row-major
  std::vector<int> degrees;
};

CPoly compile_poly(const MPoly& p) {
  CPoly out;
  out.terms.reserve(p.terms().size());
  for (const auto& term : p.terms()) {
    CTerm ct;
    ct.coef = term.coef;
    for (std::size_t v = 0; v < term.exps.size(); ++v) {
      if (term.exps[v] == 0) continue;
      if (ct.nfac == 4) {
        throw std::invalid_argument("solver supports terms with at most 4 variable factors");
      }
      ct.fac[static_cast<std::size_t>(ct.nfac++)] = {static_cast<std::uint8_t>(v), term.exps[v]};
    }
    out.terms.push_back(ct);
  }
  return out;
}

CompiledSystem compile_system(const PolySystem& sys) {
  if (static_cast<int>(sys.polys.size()) != sys.nvars) {
    throw std::invalid_argument("solver requires a square system");
  }
  CompiledSystem cs;
  cs.n = sys.nvars;
  cs.degrees = sys.degrees;
  int maxexp = 1;
  for (const auto& p : sys.polys) {
    for (const auto& t : p.terms()) {
      for (auto e : t.exps) maxexp = std::max(maxexp, static_cast<int>(e));
    }
  }
  for (int d : sys.degrees) maxexp = std::max(maxexp, d);
  cs.table_width = maxexp + 1;
  cs.f.reserve(sys.polys.size());
  for (const auto& p : sys.polys) cs.f.push_back(compile_poly(p));
  cs.jac.reserve(static_cast<std::size_t>(cs.n) * static_cast<std::size_t>(cs.n));
  for (const auto& p : sys.polys) {
    for (int v = 0; v < cs.n; ++v) cs.jac.push_back(compile_poly(p.derivative(v)));
  }
  return cs;
}

template <typename Scalar>
void fill_tables(const CompiledSystem& cs, const Scalar* x, std::vector<Scalar>& tables) {
  const int w = cs.table_width;
  tables.resize(static_cast<std::size_t>(cs.n) * static_cast<std::size_t>(w));
  for (int v = 0; v < cs.n; ++v) {
    Scalar* row = tables.data() + static_cast<std::size_t>(v) * static_cast<std::size_t>(w);
    row[0] = Scalar(1.0);
    for (int e = 1; e < w; ++e) row[e] = row[e - 1] * x[v];
  }
}

template <typename Scalar>
Scalar eval_poly(const CPoly& p, const Scalar* tables, int width) {
  Scalar acc(0.0);
  for (const auto& t : p.terms) {
    Scalar prod(1.0);
    for (int f = 0; f < t.nfac; ++f) {
      prod *= tables[static_cast<std::size_t>(t.fac[static_cast<std::size_t>(f)].first) *
                         static_cast<std::size_t>(width) +
                     t.fac[static_cast<std::size_t>(f)].second];
    }
    acc += t.coef * prod;
  }
  return acc;
}

template <typename Scalar, typename VecT, typename MatT>
void eval_f_jac(const CompiledSystem& cs, const Scalar* x, std::vector<Scalar>& tables,
                VecT* fval, MatT* jval) {
  fill_tables(cs, x, tables);
  if (fval) {
    for (int i = 0; i < cs.n; ++i) (*fval)(i) = eval_poly(cs.f[static_cast<std::size_t>(i)], tables.data(), cs.table_width);
  }
  if (jval) {
    for (int i = 0; i < cs.n; ++i) {
      for (int v = 0; v < cs.n; ++v) {
        (*jval)(i, v) = eval_poly(cs.jac[static_cast<std::size_t>(i) * static_cast<std::size_t>(cs.n) +
                                         static_cast<std::size_t>(v)],
                                  tables.data(), cs.table_width);
      }
    }
  }
}

double inf_norm(const CVec& v) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) m = std::max(m, std::abs(v(i)));
  return m;
}

double max_imag(const CVec& v) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) m = std::max(m, std::abs(v(i).imag()));
  return m;
}

// ---- path tracking -----------------------------------------------------

struct TrackScratch {
  std::vector<Cplx> tables;
  CVec h, htau, f, dx;
  CMat jf, hx;
};

// H(x, tau) = (1 - tau) gamma G(x) + tau F(x), G_i = x_i^{d_i} - 1.
// Euler predictor, up-to-opts.corrector_iters Newton corrector, step halved
// on corrector failure and doubled after a success streak. Returns false if
// the step budget is exhausted.
bool track_path(const CompiledSystem& cs, const Cplx& gamma, const SolverOptions& opts,
                CVec x, PathResult& out, TrackScratch& s) {
  const int n = cs.n;
  double tau = 0.0;
  const double tau_end = 1.0 - opts.endgame_tau;
  double dt = opts.initial_step;
  int streak = 0;
  int steps = 0;

  auto eval_h = [&](const CVec& at, double t, bool want_jac) {
    eval_f_jac(cs, at.data(), s.tables, &s.f, want_jac ? &s.jf : nullptr);
    for (int i = 0; i < n; ++i) {
      const int d = cs.degrees[static_cast<std::size_t>(i)];
      Cplx xp(1.0);
      for (int e = 0; e < d - 1; ++e) xp *= at(i);
      const Cplx gp = xp * at(i) - 1.0;  // x^d - 1
      s.h(i) = (1.0 - t) * gamma * gp + t * s.f(i);
      s.htau(i) = s.f(i) - gamma * gp;
      if (want_jac) {
        s.hx.row(i) = t * s.jf.row(i);
        s.hx(i, i) += (1.0 - t) * gamma * static_cast<double>(d) * xp;
      }
    }
  };

  while (tau < tau_end) {
    if (++steps > opts.max_steps_per_path) {
      out.status = PathStatus::truncated;
      out.steps = steps;
      return false;
    }
    const double step = std::min(dt, tau_end - tau);

    // predictor: dx/dtau from H_x v = -H_tau at (x, tau)
    eval_h(x, tau, true);
    Eigen::PartialPivLU<CMat> lu(s.hx);
    CVec xnew = x + lu.solve(-s.htau) * step;
    const double tnew = tau + step;

    // corrector: Newton on H(., tnew)
    bool ok = false;
    if (xnew.allFinite()) {
      for (int it = 0; it < opts.corrector_iters; ++it) {
        eval_h(xnew, tnew, true);
        s.dx = Eigen::PartialPivLU<CMat>(s.hx).solve(-s.h);
        if (!s.dx.allFinite()) break;
        xnew += s.dx;
        if (inf_norm(s.dx) <= opts.corrector_tol * (1.0 + inf_norm(xnew))) {
          ok = true;
          break;
        }
      }
    }

    if (ok) {
      x = xnew;
      tau = tnew;
      if (++streak >= opts.success_streak) {
        dt = std::min(dt * 2.0, opts.max_step);
        streak = 0;
      }
      if (inf_norm(x) > opts.divergence_threshold) {
        out.endpoint = x;
        out.status = PathStatus::diverged;
        out.steps = steps;
        return true;
      }
    } else {
      dt *= 0.5;
      streak = 0;
      if (dt < opts.min_step) {
        out.endpoint = x;
        out.status = PathStatus::truncated;
        out.steps = steps;
        return true;
      }
    }
  }

  // endgame: drop the start system and polish on F alone; the min-norm
  // least-squares step equals the Newton step for a regular Jacobian and
  // stays bounded when F has a positive-dimensional solution set
  for (int it = 0; it < opts.polish_iters; ++it) {
    eval_f_jac(cs, x.data(), s.tables, &s.f, &s.jf);
    if (inf_norm(s.f) < opts.endpoint_tol) break;
    Eigen::JacobiSVD<CMat> lsq(s.jf, Eigen::ComputeThinU | Eigen::ComputeThinV);
    s.dx = lsq.solve(-s.f);
    if (!s.dx.allFinite()) break;
    x += s.dx;
    if (inf_norm(x) > opts.divergence_threshold) {
      out.endpoint = x;
      out.status = PathStatus::diverged;
      out.steps = steps;
      return true;
    }
  }
  eval_f_jac(cs, x.data(), s.tables, &s.f, &s.jf);
  out.endpoint = x;
  out.final_residual = inf_norm(s.f);
  out.steps = steps;
  if (out.final_residual < opts.endpoint_tol) {
    out.status = PathStatus::converged;
    Eigen::JacobiSVD<CMat> svd(s.jf);
    out.jacobian_min_singular = svd.singularValues()(svd.singularValues().size() - 1);
  } else {
    out.status = PathStatus::truncated;
  }
  return true;
}

// minimum-norm Gauss-Newton for endpoints whose Jacobian is singular
// (points on a positive-dimensional solution set)
Vec pseudo_polish(const CompiledSystem& cs, Vec x, double tol, int max_iter) {
  std::vector<double> tables;
  Vec f(cs.n);
  Mat j(cs.n, cs.n);
  for (int it = 0; it < max_iter; ++it) {
    eval_f_jac(cs, x.data(), tables, &f, &j);
    if (f.lpNorm<Eigen::Infinity>() < tol) break;
    Eigen::JacobiSVD<Mat> svd(j, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-10);
    Vec dx = svd.solve(-f);
    if (!dx.allFinite() || dx.norm() < 1e-16) break;
    x += dx;
  }
  return x;
}

long long llround6(double x) { return std::llround(x * 1e6); }

}  // namespace

PolishResult newton_polish(const PolySystem& system, const Vec& point, int max_iter, double tol) {
  if (static_cast<int>(system.polys.size()) != system.nvars) {
    throw std::invalid_argument("newton_polish: system is not square");
  }
  if (point.size() != system.nvars) {
    throw std::invalid_argument("newton_polish: point dimension mismatch");
  }
  const CompiledSystem cs = compile_system(system);
  std::vector<double> tables;
  PolishResult res;
  res.point = point;
  Vec f(cs.n);
  Mat j(cs.n, cs.n);
  for (int it = 0; it < max_iter; ++it) {
    eval_f_jac(cs, res.point.data(), tables, &f, &j);
    res.residual = f.lpNorm<Eigen::Infinity>();
    res.iterations = it;
    if (res.residual < tol) {
      res.converged = true;
      return res;
    }
    Eigen::FullPivLU<Mat> lu(j);
    lu.setThreshold(1e-10);
    if (!lu.isInvertible()) {
      res.rank_deficient = true;
      return res;
    }
    Vec dx = lu.solve(-f);
    if (!dx.allFinite()) {
      res.rank_deficient = true;
      return res;
    }
    res.point += dx;
  }
  eval_f_jac<double, Vec, Mat>(cs, res.point.data(), tables, &f, nullptr);
  res.residual = f.lpNorm<Eigen::Infinity>();
  res.converged = res.residual < tol;
  res.iterations = max_iter;
  return res;
}

Mat canonicalize(const Mat& t, const Mat& a) {
  if (a.cols() != t.rows() || t.rows() != t.cols()) {
    throw std::invalid_argument("canonicalize: A is p x k and T is k x k");
  }
  const Eigen::Index k = t.cols();
  const Mat lambda = a * t;

  // sort key per column: (rounded ||lambda_v||, rounded |lambda_v| entries,
  // rounded |t_v| entries), all descending; rounding at 6 decimals so every
  // member of an orbit resolves ties identically
  struct Key {
    long long norm;
    std::vector<long long> labs, tabs;
    Eigen::Index col;
  };
  std::vector<Key> keys(static_cast<std::size_t>(k));
  for (Eigen::Index v = 0; v < k; ++v) {
    Key& key = keys[static_cast<std::size_t>(v)];
    key.col = v;
    key.norm = llround6(lambda.col(v).norm());
    key.labs.resize(static_cast<std::size_t>(lambda.rows()));
    for (Eigen::Index i = 0; i < lambda.rows(); ++i) {
      key.labs[static_cast<std::size_t>(i)] = llround6(std::abs(lambda(i, v)));
    }
    key.tabs.resize(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < k; ++i) {
      key.tabs[static_cast<std::size_t>(i)] = llround6(std::abs(t(i, v)));
    }
  }
  std::stable_sort(keys.begin(), keys.end(), [](const Key& x, const Key& y) {
    if (x.norm != y.norm) return x.norm > y.norm;
    if (x.labs != y.labs) return x.labs > y.labs;
    return x.tabs > y.tabs;
  });

  Mat out(k, k);
  for (Eigen::Index v = 0; v < k; ++v) {
    Vec col = t.col(keys[static_cast<std::size_t>(v)].col);
    // sign: the first coordinate within 1e-6 of the column's max |entry|
    // becomes positive (ties at the max are genuine, e.g. 45 degree rotations)
    const double mx = col.cwiseAbs().maxCoeff();
    for (Eigen::Index u = 0; u < k; ++u) {
      if (std::abs(col(u)) >= mx - 1e-6) {
        if (col(u) < 0.0) col = -col;
        break;
      }
    }
    out.col(v) = col;
  }
  return out;
}

StationarySet solve_all(const PolySystem& system, std::uint64_t seed, const SolverOptions& opts) {
  const CompiledSystem cs = compile_system(system);
  const int n = cs.n;
  if (n == 0) throw std::invalid_argument("solve_all: empty system");

  long long n_paths = 1;
  for (int d : cs.degrees) {
    n_paths *= d;
    if (n_paths > (1LL << 40)) throw std::invalid_argument("solve_all: path count overflow");
  }

  RngStream gamma_stream(seed, 0, rng_domain::solver);
  const double angle = 2.0 * M_PI * gamma_stream.uniform01();
  const Cplx gamma(std::cos(angle), std::sin(angle));

  // start roots x_i = exp(2 pi sqrt(-1) j_i / d_i), enumerated mixed-radix so
  // the path order (and with it every downstream artifact) is deterministic
  std::vector<long long> stride(static_cast<std::size_t>(n), 1);
  for (int i = n - 2; i >= 0; --i) {
    stride[static_cast<std::size_t>(i)] =
        stride[static_cast<std::size_t>(i + 1)] * cs.degrees[static_cast<std::size_t>(i + 1)];
  }

  std::vector<PathResult> results(static_cast<std::size_t>(n_paths));
  std::vector<char> budget_blown(static_cast<std::size_t>(n_paths), 0);

  const int n_threads = std::max(1, opts.threads);
  auto worker = [&](long long begin, long long end) {
    TrackScratch scratch;
    scratch.h.resize(n);
    scratch.htau.resize(n);
    scratch.f.resize(n);
    scratch.dx.resize(n);
    scratch.jf.resize(n, n);
    scratch.hx.resize(n, n);
    CVec start(n);
    for (long long pth = begin; pth < end; ++pth) {
      for (int i = 0; i < n; ++i) {
        const int d = cs.degrees[static_cast<std::size_t>(i)];
        const long long digit = (pth / stride[static_cast<std::size_t>(i)]) % d;
        const double ang = 2.0 * M_PI * static_cast<double>(digit) / static_cast<double>(d);
        start(i) = Cplx(std::cos(ang), std::sin(ang));
      }
      if (!track_path(cs, gamma, opts, start, results[static_cast<std::size_t>(pth)], scratch)) {
        budget_blown[static_cast<std::size_t>(pth)] = 1;
      }
    }
  };

  if (n_threads == 1) {
    worker(0, n_paths);
  } else {
    std::vector<std::thread> pool;
    const long long chunk = (n_paths + n_threads - 1) / n_threads;
    for (int t = 0; t < n_threads; ++t) {
      const long long b = t * chunk;
      const long long e = std::min(n_paths, b + chunk);
      if (b < e) pool.emplace_back(worker, b, e);
    }
    for (auto& th : pool) th.join();
  }

  StationarySet set;
  set.n_paths_tracked = n_paths;
  long long blown = 0;
  for (long long i = 0; i < n_paths; ++i) {
    const auto& r = results[static_cast<std::size_t>(i)];
    blown += budget_blown[static_cast<std::size_t>(i)];
    if (r.status == PathStatus::converged) {
      ++set.n_converged;
      // a rank-deficient endpoint Jacobian signals a positive-dimensional
      // stationary set; endpoints land at complex witness points of such a
      // set, so this must be checked before the realness filter below
      if (r.jacobian_min_singular < opts.rank_tol) set.continuum_flag = true;
    } else if (r.status == PathStatus::diverged) {
      ++set.n_diverged;
    } else {
      ++set.n_truncated;
    }
  }
  if (blown > 0) {
    throw std::runtime_error("solve_all: step budget exhausted on " + std::to_string(blown) +
                             " of " + std::to_string(n_paths) + " paths (converged " +
                             std::to_string(set.n_converged) + ", diverged " +
                             std::to_string(set.n_diverged) + ", truncated " +
                             std::to_string(set.n_truncated) + ")");
  }

  // real endpoints -> polish on the real system -> residual gates -> dedup
  struct PointRec {
    Vec x;
    Mat t;
    Mat canon;
    RotationCandidate cand;
    double sigma_min = 0.0;
  };
  std::vector<PointRec> recs;
  const int k = system.k;
  for (long long i = 0; i < n_paths; ++i) {
    const auto& r = results[static_cast<std::size_t>(i)];
    if (r.status != PathStatus::converged || max_imag(r.endpoint) > opts.im_tol) continue;
    Vec x = r.endpoint.real();
    PolishResult pr = newton_polish(system, x, opts.polish_iters, opts.endpoint_tol * 1e-2);
    if (pr.rank_deficient) {
      x = pseudo_polish(cs, x, opts.endpoint_tol, 2 * opts.polish_iters);
    } else {
      x = pr.point;
    }

    PointRec rec;
    rec.x = x;
    rec.t = Eigen::Map<const Mat>(x.data(), k, k).transpose();  // row-major vars
    rec.cand = make_candidate(system.a, rec.t, system.spec);
    if (rec.cand.orth_residual >= 1e-8 || rec.cand.stat_residual >= 1e-8) {
      ++set.n_rejected;
      continue;
    }
    {
      std::vector<double> tables;
      Mat j(n, n);
      eval_f_jac<double, Vec, Mat>(cs, x.data(), tables, nullptr, &j);
      Eigen::JacobiSVD<Mat> svd(j);
      rec.sigma_min = svd.singularValues()(svd.singularValues().size() - 1);
    }
    if (rec.sigma_min < opts.rank_tol) set.continuum_flag = true;
    recs.push_back(std::move(rec));
  }

  // deterministic dedup: lexicographic pre-sort, then greedy acceptance
  std::sort(recs.begin(), recs.end(), [](const PointRec& a, const PointRec& b) {
    for (Eigen::Index i = 0; i < a.x.size(); ++i) {
      const long long ra = std::llround(a.x(i) * 1e9);
      const long long rb = std::llround(b.x(i) * 1e9);
      if (ra != rb) return ra < rb;
    }
    return false;
  });
  std::vector<PointRec> unique;
  for (auto& rec : recs) {
    bool dup = false;
    for (const auto& u : unique) {
      if ((rec.x - u.x).norm() < opts.dedup_tol) {
        dup = true;
        break;
      }
    }
    if (!dup) unique.push_back(std::move(rec));
  }

  // canonical presentation order: best q first, canonical form as tie break
  for (auto& u : unique) u.canon = canonicalize(u.t, system.a);
  std::sort(unique.begin(), unique.end(), [](const PointRec& a, const PointRec& b) {
    const long long qa = std::llround(a.cand.q_value * 1e9);
    const long long qb = std::llround(b.cand.q_value * 1e9);
    if (qa != qb) return qa > qb;
    for (Eigen::Index cc = 0; cc < a.canon.cols(); ++cc) {
      for (Eigen::Index rr = 0; rr < a.canon.rows(); ++rr) {
        const long long ca = llround6(a.canon(rr, cc));
        const long long cb = llround6(b.canon(rr, cc));
        if (ca != cb) return ca < cb;
      }
    }
    for (Eigen::Index cc = 0; cc < a.t.cols(); ++cc) {
      for (Eigen::Index rr = 0; rr < a.t.rows(); ++rr) {
        if (a.t(rr, cc) != b.t(rr, cc)) return a.t(rr, cc) < b.t(rr, cc);
      }
    }
    return false;
  });

  // orbit classes by union-find over the exact orbit distance
  const int np = static_cast<int>(unique.size());
  std::vector<int> parent(static_cast<std::size_t>(np));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int i) {
    while (parent[static_cast<std::size_t>(i)] != i) {
      parent[static_cast<std::size_t>(i)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
      i = parent[static_cast<std::size_t>(i)];
    }
    return i;
  };
  for (int i = 0; i < np; ++i) {
    for (int j = i + 1; j < np; ++j) {
      if (column_orbit_distance(unique[static_cast<std::size_t>(i)].t,
                                unique[static_cast<std::size_t>(j)].t) < opts.dedup_tol) {
        parent[static_cast<std::size_t>(find(j))] = find(i);
      }
    }
  }
  std::vector<OrbitClass> classes;
  for (int i = 0; i < np; ++i) {
    if (find(i) != i) continue;
    OrbitClass cls;
    for (int j = 0; j < np; ++j) {
      if (find(j) == i) cls.members.push_back(j);
    }
    cls.representative = cls.members.front();
    cls.q_value = unique[static_cast<std::size_t>(cls.representative)].cand.q_value;
    classes.push_back(std::move(cls));
  }
  std::sort(classes.begin(), classes.end(), [](const OrbitClass& a, const OrbitClass& b) {
    const long long qa = std::llround(a.q_value * 1e9);
    const long long qb = std::llround(b.q_value * 1e9);
    if (qa != qb) return qa > qb;
    return a.representative < b.representative;
  });

  for (auto& u : unique) set.points.push_back(std::move(u.cand));
  set.classes = std::move(classes);
  set.global_class = 0;
  for (std::size_t c = 1; c < set.classes.size(); ++c) {
    if (set.classes[c].q_value > set.classes[static_cast<std::size_t>(set.global_class)].q_value) {
      set.global_class = static_cast<int>(c);
    }
  }
  if (opts.keep_path_diagnostics) set.path_diagnostics = std::move(results);
  return set;
}

}  // namespace orthorot
