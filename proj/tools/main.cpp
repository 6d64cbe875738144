// Command line front end: criterion evaluation, rotation engines, structure
// checks, the simulation protocol, and figure generation.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "orthorot/classifier.hpp"
#include "orthorot/criterion.hpp"
#include "orthorot/gpa.hpp"
#include "orthorot/homotopy.hpp"
#include "orthorot/polysys.hpp"
#include "orthorot/report.hpp"
#include "orthorot/simulation.hpp"
#include "orthorot/structure.hpp"

namespace fs = std::filesystem;
using namespace orthorot;

namespace {

int default_threads() {
  if (const char* env = std::getenv("ORTHOROT_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

struct CriterionArgs {
  std::string name = "varimax";
  std::optional<double> omega;

  void attach(CLI::App* cmd) {
    cmd->add_option("--criterion", name,
                    "quartimax | varimax | equamax | parsimax | omega=<x>");
    cmd->add_option("--omega", omega, "explicit omega value (overrides --criterion)");
  }
  CriterionChoice choice() const {
    if (omega) return CriterionChoice::parse("omega=" + format_sig(*omega, 17));
    return CriterionChoice::parse(name);
  }
};

std::vector<int> parse_stages(const std::string& text) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string part = text.substr(pos, comma - pos);
    const std::size_t dots = part.find("..");
    if (dots == std::string::npos) {
      out.push_back(std::stoi(part));
    } else {
      const int a = std::stoi(part.substr(0, dots));
      const int b = std::stoi(part.substr(dots + 2));
      if (b < a) throw std::invalid_argument("--stages range is reversed: " + part);
      for (int s = a; s <= b; ++s) out.push_back(s);
    }
    pos = comma + 1;
  }
  if (out.empty()) throw std::invalid_argument("--stages produced an empty list");
  return out;
}

struct LoadedMatrix {
  Mat a;
  std::string path;
  std::uint64_t hash = 0;
};

LoadedMatrix load_matrix(const std::string& path) {
  LoadedMatrix lm;
  lm.path = path;
  const std::string text = read_text_file(path);
  lm.hash = fnv1a64(text);
  if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
    lm.a = parse_matrix_json(text);
  } else {
    lm.a = parse_matrix_csv(text);
  }
  return lm;
}

void emit(const std::string& text) { std::cout << text; }

// ---- subcommand payloads -------------------------------------------------

struct ValueCmd {
  std::string matrix;
  CriterionArgs crit;
  int run() const {
    const LoadedMatrix lm = load_matrix(matrix);
    const OrthomaxSpec spec = crit.choice().to_spec(lm.a.rows(), lm.a.cols());
    emit(format_sig(orthomax_value(lm.a, spec), 12) + "\n");
    return 0;
  }
};

struct GradientCmd {
  std::string matrix;
  std::string rotation;
  std::string out;
  CriterionArgs crit;
  int run() const {
    const LoadedMatrix lm = load_matrix(matrix);
    const OrthomaxSpec spec = crit.choice().to_spec(lm.a.rows(), lm.a.cols());
    const Mat t = rotation.empty() ? Mat(Mat::Identity(lm.a.cols(), lm.a.cols()))
                                   : load_matrix(rotation).a;
    const Mat g = orthomax_gradient(lm.a, t, spec);
    if (!out.empty()) write_text_file(out, matrix_to_csv(g));
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      for (Eigen::Index j = 0; j < g.cols(); ++j) {
        if (j) emit(",");
        emit(format_sig(g(i, j), 12));
      }
      emit("\n");
    }
    return 0;
  }
};

struct GpaCmd {
  std::string matrix;
  std::string t0_path;
  std::string out;
  CriterionArgs crit;
  GpaOptions opts;
  int run() const {
    const LoadedMatrix lm = load_matrix(matrix);
    const OrthomaxSpec spec = crit.choice().to_spec(lm.a.rows(), lm.a.cols());
    const Mat t0 = t0_path.empty() ? Mat(Mat::Identity(lm.a.cols(), lm.a.cols()))
                                   : load_matrix(t0_path).a;
    const GpaResult res = gpa_rotate(lm.a, spec, t0, opts);
    emit("q = " + format_sig(res.candidate.q_value, 12) +
         "  iterations = " + std::to_string(res.iterations) +
         "  converged = " + (res.converged ? "yes" : "no") +
         "  stationarity = " + format_sig(res.candidate.stat_residual, 12) + "\n");
    if (!out.empty()) {
      StationarySet single;
      single.points.push_back(res.candidate);
      OrbitClass cls;
      cls.members = {0};
      cls.representative = 0;
      cls.q_value = res.candidate.q_value;
      single.classes.push_back(cls);
      ResultsContext ctx{lm.path, lm.hash, crit.choice().name, 0};
      write_text_file(out, results_to_json(single, nullptr, lm.a, spec, ctx));
    }
    return res.converged ? 0 : 1;
  }
};

struct EnumerateCmd {
  std::string matrix;
  std::string out;
  std::string dump_system;
  CriterionArgs crit;
  std::uint64_t seed = 0;
  int threads = default_threads();
  bool with_labels = false;  // classify subcommand
  SolverOptions opts;
  int run() const {
    const LoadedMatrix lm = load_matrix(matrix);
    const OrthomaxSpec spec = crit.choice().to_spec(lm.a.rows(), lm.a.cols());
    const PolySystem sys = build_stationarity_system(lm.a, spec);
    if (!dump_system.empty()) {
      if (dump_system == "-") emit(sys.dump());
      else write_text_file(dump_system, sys.dump());
    }
    SolverOptions o = opts;
    o.threads = threads;
    const StationarySet set = solve_all(sys, seed, o);
    std::optional<ClassifiedSet> labels;
    try {
      labels = classify_set(set, lm.a, spec);
    } catch (const std::exception&) {
      // multiplier recovery can fail on continuum endpoints; report unlabeled
    }

    ResultsContext ctx{lm.path, lm.hash, crit.choice().name, seed};
    const std::string doc = results_to_json(set, labels ? &*labels : nullptr, lm.a, spec, ctx);
    if (!out.empty()) write_text_file(out, doc);

    if (!with_labels && out.empty()) {
      emit(doc);
      return 0;
    }
    emit("paths=" + std::to_string(set.n_paths_tracked) +
         " converged=" + std::to_string(set.n_converged) +
         " real=" + std::to_string(set.points.size()) +
         " classes=" + std::to_string(set.classes.size()) +
         " continuum=" + (set.continuum_flag ? "yes" : "no"));
    if (!set.classes.empty()) {
      emit(" q_max=" +
           format_sig(set.classes[static_cast<std::size_t>(set.global_class)].q_value, 12));
    }
    emit("\n");
    if (with_labels) {
      for (std::size_t c = 0; c < set.classes.size(); ++c) {
        emit("class " + std::to_string(c) + ": size=" +
             std::to_string(set.classes[c].members.size()) +
             " q=" + format_sig(set.classes[c].q_value, 12) + " label=" +
             (labels ? to_string(labels->class_labels[c]) : "unlabeled") + "\n");
      }
    }
    return 0;
  }
};

struct PssCheckCmd {
  std::string matrix;
  std::string paper_matrix;
  std::string out;
  std::string rotation_out;
  StructureTols tols;
  int run() const {
    Mat a;
    if (!paper_matrix.empty()) {
      if (paper_matrix == "printed") a = study_matrices().a_printed;
      else if (paper_matrix == "orthogonal") a = study_matrices().a_orthogonal;
      else throw std::invalid_argument("--paper-matrix must be printed or orthogonal");
    } else if (!matrix.empty()) {
      a = load_matrix(matrix).a;
    } else {
      throw std::invalid_argument("pss-check needs --matrix or --paper-matrix");
    }
    const PssAnalysis analysis = pss_analyze(a, tols);
    if (analysis.partition) {
      emit("perfect simple structure: attainable (clusters=" +
           std::to_string(analysis.partition->cluster_count) + ")\n");
      if (!rotation_out.empty()) {
        write_text_file(rotation_out, matrix_to_csv(pss_rotation(a, *analysis.partition, tols)));
      }
    } else if (analysis.too_many_clusters) {
      emit("perfect simple structure: not attainable (more than k parallel classes)\n");
    } else {
      emit("perfect simple structure: not attainable\n");
      for (const auto& v : analysis.violations) {
        emit("  clusters " + std::to_string(v.cluster_a + 1) + " and " +
             std::to_string(v.cluster_b + 1) +
             " not orthogonal: dot = " + format_sig(v.raw_dot, 12) + "\n");
      }
    }
    if (!out.empty()) {
      std::string json = "{\n  \"attainable\": ";
      json += analysis.partition ? "true" : "false";
      json += ",\n  \"too_many_clusters\": ";
      json += analysis.too_many_clusters ? "true" : "false";
      if (analysis.partition) {
        json += ",\n  \"clusters\": " + std::to_string(analysis.partition->cluster_count);
        json += ",\n  \"assignments\": [";
        for (std::size_t i = 0; i < analysis.partition->assignments.size(); ++i) {
          if (i) json += ",";
          json += std::to_string(analysis.partition->assignments[i]);
        }
        json += "]";
      }
      json += ",\n  \"violations\": [";
      for (std::size_t i = 0; i < analysis.violations.size(); ++i) {
        if (i) json += ",";
        json += "\n    {\"cluster_a\": " + std::to_string(analysis.violations[i].cluster_a) +
                ", \"cluster_b\": " + std::to_string(analysis.violations[i].cluster_b) +
                ", \"dot\": " + format_sig(analysis.violations[i].raw_dot, 17) + "}";
      }
      json += analysis.violations.empty() ? "]\n}\n" : "\n  ]\n}\n";
      write_text_file(out, json);
    }
    return 0;
  }
};

struct ThurstoneCmd {
  std::string matrix;
  double zero_tol = 0.1;
  int run() const {
    const LoadedMatrix lm = load_matrix(matrix);
    const ThurstoneReport rep = thurstone_report(lm.a, zero_tol);
    emit("gamma=" + std::to_string(rep.gamma) + " delta=" + std::to_string(rep.delta) +
         " row_rule=" + (rep.every_row_has_zero ? "yes" : "no") +
         " column_rule=" + (rep.every_column_has_k_zeros ? "yes" : "no") + "\n");
    for (const auto& pc : rep.per_pair) {
      emit("  columns (" + std::to_string(pc.col_u + 1) + "," + std::to_string(pc.col_v + 1) +
           "): exactly_one=" + std::to_string(pc.zero_in_exactly_one) +
           " both=" + std::to_string(pc.zero_in_both) + "\n");
    }
    return 0;
  }
};

struct IdentityCmd {
  std::string matrix;
  CriterionArgs crit;
  int run() const {
    const LoadedMatrix lm = load_matrix(matrix);
    const OrthomaxSpec spec = crit.choice().to_spec(lm.a.rows(), lm.a.cols());
    double max_abs = 0.0;
    for (Eigen::Index u = 0; u < spec.k; ++u) {
      for (Eigen::Index v = u + 1; v < spec.k; ++v) {
        const double f = identity_stationarity_residual(lm.a, spec, u, v);
        max_abs = std::max(max_abs, std::abs(f));
        emit("f(" + std::to_string(u + 1) + "," + std::to_string(v + 1) +
             ") = " + format_sig(f, 12) + "\n");
      }
    }
    emit("max|f| = " + format_sig(max_abs, 12) + "\n");
    emit(max_abs < 1e-8 ? "identity is stationary\n" : "identity is not stationary\n");
    return 0;
  }
};

struct SimulateCmd {
  std::string schedule = "both";
  std::string stages;
  std::string criteria;
  std::string paper_matrix = "orthogonal";
  std::string engine = "gpa";
  std::string out_dir = ".";
  SimConfig config;
  int run() {
    if (schedule == "S") config.schedules = {Schedule::S};
    else if (schedule == "W") config.schedules = {Schedule::W};
    else if (schedule == "both") config.schedules = {Schedule::S, Schedule::W};
    else throw std::invalid_argument("--schedule must be S, W, or both");

    if (!stages.empty()) config.stages = parse_stages(stages);
    if (!criteria.empty()) {
      config.criteria.clear();
      std::size_t pos = 0;
      while (pos < criteria.size()) {
        std::size_t comma = criteria.find(',', pos);
        if (comma == std::string::npos) comma = criteria.size();
        config.criteria.push_back(CriterionChoice::parse(criteria.substr(pos, comma - pos)));
        pos = comma + 1;
      }
    }
    if (paper_matrix == "printed") config.base = BaseMatrix::printed;
    else if (paper_matrix == "orthogonal") config.base = BaseMatrix::orthogonal;
    else throw std::invalid_argument("--paper-matrix must be printed or orthogonal");

    if (engine == "solver") config.engine = Engine::solver;
    else if (engine == "gpa") config.engine = Engine::gpa;
    else if (engine == "both") config.engine = Engine::both;
    else throw std::invalid_argument("--engine must be solver, gpa, or both");

    const SimResult result = run_simulation(config);

    fs::create_directories(out_dir);
    const std::string records = records_to_csv(result.records);
    const std::string summaries = summaries_to_csv(result.summaries);
    const std::string records_path = (fs::path(out_dir) / "records.csv").string();
    const std::string summaries_path = (fs::path(out_dir) / "summaries.csv").string();
    write_text_file(records_path, records);
    write_text_file(summaries_path, summaries);
    const std::string manifest = manifest_json(
        "simulate", config.seed, config.threads, {},
        {{records_path, fnv1a64(records)}, {summaries_path, fnv1a64(summaries)}});
    write_text_file((fs::path(out_dir) / "manifest.json").string(), manifest);
    emit("records=" + std::to_string(result.records.size()) +
         " summaries=" + std::to_string(result.summaries.size()) + " out=" + out_dir + "\n");
    return 0;
  }
};

struct PlotCmd {
  std::string summaries_path;
  std::string out_dir = ".";
  int run() const {
    const std::string text = read_text_file(summaries_path);
    const std::vector<StageSummary> summaries = parse_summaries_csv(text);
    fs::create_directories(out_dir);

    struct MetricDef {
      const char* file_tag;
      const char* title;
      std::function<std::optional<double>(const StageSummary&)> get;
    };
    const std::vector<MetricDef> metrics = {
        {"fig1_perfect_rows", "mean perfect simple rows",
         [](const StageSummary& s) -> std::optional<double> {
           return std::isnan(s.mean_perfect_rows) ? std::nullopt
                                                  : std::optional<double>(s.mean_perfect_rows);
         }},
        {"fig2_moderate_rows", "mean moderately simple rows",
         [](const StageSummary& s) -> std::optional<double> {
           return std::isnan(s.mean_moderate_rows) ? std::nullopt
                                                   : std::optional<double>(s.mean_moderate_rows);
         }},
        {"fig3_zero_elements", "mean zero elements",
         [](const StageSummary& s) -> std::optional<double> {
           return std::isnan(s.mean_zero_elements) ? std::nullopt
                                                   : std::optional<double>(s.mean_zero_elements);
         }},
        {"fig4_dist_global", "mean distance to the global optimum",
         [](const StageSummary& s) { return s.mean_dist_global; }},
        {"fig4_dist_nearest", "mean distance to the nearest stationary point",
         [](const StageSummary& s) { return s.mean_dist_nearest; }},
        {"fig5_n_max", "mean number of max classes",
         [](const StageSummary& s) { return s.mean_n_max; }},
        {"fig5_n_min", "mean number of min classes",
         [](const StageSummary& s) { return s.mean_n_min; }},
        {"fig5_n_indet", "mean number of indeterminate classes",
         [](const StageSummary& s) { return s.mean_n_indet; }},
    };

    std::vector<ManifestEntry> outputs;
    for (Schedule schedule : {Schedule::S, Schedule::W}) {
      // preserve first-appearance order of criteria in the file
      std::vector<std::string> criteria;
      for (const auto& s : summaries) {
        if (s.schedule != schedule) continue;
        bool known = false;
        for (const auto& c : criteria) known = known || c == s.criterion;
        if (!known) criteria.push_back(s.criterion);
      }
      if (criteria.empty()) continue;

      for (const auto& metric : metrics) {
        std::vector<ChartSeries> series;
        bool has_data = false;
        for (const auto& crit : criteria) {
          ChartSeries cs;
          cs.label = crit;
          for (const auto& s : summaries) {
            if (s.schedule != schedule || s.criterion != crit) continue;
            const auto v = metric.get(s);
            cs.x.push_back(s.stage);
            cs.y.push_back(v ? *v : std::numeric_limits<double>::quiet_NaN());
            has_data = has_data || v.has_value();
          }
          series.push_back(std::move(cs));
        }
        if (!has_data) continue;
        const std::string title =
            std::string(metric.title) + " (type " + to_string(schedule) + ")";
        const std::string svg = line_chart_svg(title, "stage", metric.title, series);
        const std::string name = std::string(metric.file_tag) + "_" + to_string(schedule) + ".svg";
        const std::string path = (fs::path(out_dir) / name).string();
        write_text_file(path, svg);
        outputs.push_back({path, fnv1a64(svg)});
      }
    }
    write_text_file((fs::path(out_dir) / "plot_manifest.json").string(),
                    manifest_json("plot", 0, 1, {{summaries_path, fnv1a64(text)}}, outputs));
    emit("figures=" + std::to_string(outputs.size()) + " out=" + out_dir + "\n");
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"orthomax rotation toolkit: criterion evaluation, complete stationary point "
               "enumeration, gradient projection, structure checks, and the perturbation study"};
  app.require_subcommand(1);

  ValueCmd value;
  auto* c_value = app.add_subcommand("value", "criterion value of a loading matrix");
  c_value->add_option("--matrix", value.matrix, "loading matrix (csv or json)")->required();
  value.crit.attach(c_value);

  GradientCmd gradient;
  auto* c_grad = app.add_subcommand("gradient", "gradient of T -> Q(A T)");
  c_grad->add_option("--matrix", gradient.matrix, "matrix A (csv or json)")->required();
  c_grad->add_option("--rotation", gradient.rotation, "rotation T (default identity)");
  c_grad->add_option("--out", gradient.out, "write the gradient as csv");
  gradient.crit.attach(c_grad);

  GpaCmd gpa;
  auto* c_gpa = app.add_subcommand("gpa", "gradient projection rotation");
  c_gpa->add_option("--matrix", gpa.matrix)->required();
  c_gpa->add_option("--t0", gpa.t0_path, "starting rotation (default identity)");
  c_gpa->add_option("--out", gpa.out, "write the result document (json)");
  c_gpa->add_option("--max-iter", gpa.opts.max_iter);
  c_gpa->add_option("--tol-stop", gpa.opts.tol_stop);
  c_gpa->add_option("--alpha0", gpa.opts.alpha0);
  gpa.crit.attach(c_gpa);

  EnumerateCmd enumerate;
  auto* c_enum = app.add_subcommand("enumerate", "all stationary rotations via homotopy");
  EnumerateCmd classify;
  classify.with_labels = true;
  auto* c_classify = app.add_subcommand("classify", "enumerate and label max/min/indeterminate");
  for (auto [cmd, payload] : {std::pair{c_enum, &enumerate}, std::pair{c_classify, &classify}}) {
    cmd->add_option("--matrix", payload->matrix)->required();
    cmd->add_option("--seed", payload->seed, "seed for the path-tracking constants");
    cmd->add_option("--threads", payload->threads, "worker threads (ORTHOROT_THREADS)");
    cmd->add_option("--out", payload->out, "write the result document (json)");
    cmd->add_option("--dump-system", payload->dump_system,
                    "write the polynomial system ('-' for stdout)");
    cmd->add_option("--tol-dedup", payload->opts.dedup_tol);
    cmd->add_option("--tol-end", payload->opts.endpoint_tol);
    payload->crit.attach(cmd);
  }

  PssCheckCmd pss;
  auto* c_pss = app.add_subcommand("pss-check", "test for rotatability to perfect simple structure");
  c_pss->add_option("--matrix", pss.matrix);
  c_pss->add_option("--paper-matrix", pss.paper_matrix, "printed | orthogonal study base");
  c_pss->add_option("--out", pss.out, "write the analysis (json)");
  c_pss->add_option("--rotation-out", pss.rotation_out, "write the constructed rotation (csv)");
  c_pss->add_option("--tol-zero", pss.tols.zero);
  c_pss->add_option("--tol-par", pss.tols.parallel);
  c_pss->add_option("--tol-orth", pss.tols.orthogonal);

  ThurstoneCmd thurstone;
  auto* c_thu = app.add_subcommand("thurstone-check", "zero-pattern class of a loading matrix");
  c_thu->add_option("--matrix", thurstone.matrix)->required();
  c_thu->add_option("--tol-zero", thurstone.zero_tol, "zero threshold (default 0.1)");

  IdentityCmd identity;
  auto* c_id = app.add_subcommand("identity-stationarity",
                                  "is the identity a stationary rotation of A");
  c_id->add_option("--matrix", identity.matrix)->required();
  identity.crit.attach(c_id);

  SimulateCmd simulate;
  auto* c_sim = app.add_subcommand("simulate", "the 9 x 3 perturbation study");
  c_sim->add_option("--schedule", simulate.schedule, "S | W | both (default both)");
  c_sim->add_option("--stages", simulate.stages, "a..b or comma list (default 1..27)");
  c_sim->add_option("--replicates", simulate.config.replicates, "default 50");
  c_sim->add_option("--criteria", simulate.criteria,
                    "comma list (default quartimax,varimax,equamax,parsimax)");
  c_sim->add_option("--seed", simulate.config.seed)->required();
  c_sim->add_option("--engine", simulate.engine, "solver | gpa | both (default gpa)");
  c_sim->add_option("--paper-matrix", simulate.paper_matrix, "printed | orthogonal");
  c_sim->add_option("--threads", simulate.config.threads)->default_val(default_threads());
  c_sim->add_option("--out", simulate.out_dir, "output directory");
  c_sim->add_option("--zero-threshold", simulate.config.zero_threshold);
  c_sim->add_flag("--orbit-nearest", simulate.config.orbit_nearest,
                  "orbit-invariant nearest distance");

  PlotCmd plot;
  auto* c_plot = app.add_subcommand("plot", "render figures from a summaries csv");
  c_plot->add_option("--summaries", plot.summaries_path)->required();
  c_plot->add_option("--out", plot.out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (c_value->parsed()) return value.run();
    if (c_grad->parsed()) return gradient.run();
    if (c_gpa->parsed()) return gpa.run();
    if (c_enum->parsed()) return enumerate.run();
    if (c_classify->parsed()) return classify.run();
    if (c_pss->parsed()) return pss.run();
    if (c_thu->parsed()) return thurstone.run();
    if (c_id->parsed()) return identity.run();
    if (c_sim->parsed()) return simulate.run();
    if (c_plot->parsed()) return plot.run();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
