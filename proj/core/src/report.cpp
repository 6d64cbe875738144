#include "orthorot/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace orthorot {

namespace {

using ordered_json = nlohmann::ordered_json;

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

ordered_json matrix_to_json_array(const Mat& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string opt_cell(const std::optional<double>& v, int sig) {
  return v ? format_sig(*v, sig) : "nan";
}

std::string opt_cell(const std::optional<int>& v) {
  return v ? std::to_string(*v) : "nan";
}

std::string timestamp_utc() {
  std::time_t t;
  if (const char* sde = std::getenv("SOURCE_DATE_EPOCH")) {
    t = static_cast<std::time_t>(std::strtoll(sde, nullptr, 10));
  } else {
    t = std::time(nullptr);
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

const char* chart_color(const std::string& label, std::size_t index) {
  // the conventional palette for the four named criteria, stable fallback
  if (label == "quartimax") return "#2451c8";
  if (label == "varimax") return "#c82424";
  if (label == "equamax") return "#1e8c3c";
  if (label == "parsimax") return "#7a28b4";
  static const char* fallback[] = {"#2451c8", "#c82424", "#1e8c3c",
                                   "#7a28b4", "#c87f24", "#24a0c8"};
  return fallback[index % 6];
}

}  // namespace

std::string format_sig(double x, int significant) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", significant, x);
  return buf;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Mat parse_matrix_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& cell : split(line, ',')) {
      std::size_t pos = 0;
      double v = std::stod(cell, &pos);
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::invalid_argument("matrix csv: ragged rows");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("matrix csv: empty input");
  Mat m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows.front().size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

Mat parse_matrix_json(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  if (!doc.is_array() || doc.empty() || !doc.front().is_array()) {
    throw std::invalid_argument("matrix json: expected an array of row arrays");
  }
  const std::size_t cols = doc.front().size();
  Mat m(static_cast<Eigen::Index>(doc.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < doc.size(); ++i) {
    if (doc[i].size() != cols) throw std::invalid_argument("matrix json: ragged rows");
    for (std::size_t j = 0; j < cols; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = doc[i][j].get<double>();
    }
  }
  return m;
}

std::string matrix_to_csv(const Mat& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ",";
      out += format_sig(m(i, j), 17);
    }
    out += "\n";
  }
  return out;
}

Mat read_matrix(const std::string& path) {
  const std::string text = read_text_file(path);
  if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
    return parse_matrix_json(text);
  }
  return parse_matrix_csv(text);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::string results_to_json(const StationarySet& set, const ClassifiedSet* classified,
                            const Mat& a, const OrthomaxSpec& spec,
                            const ResultsContext& ctx) {
  ordered_json doc;
  doc["schema_version"] = 1;
  doc["input"] = {{"path", ctx.input_path},
                  {"rows", a.rows()},
                  {"cols", a.cols()},
                  {"fnv1a64", hash_hex(ctx.input_hash)}};
  doc["spec"] = {{"criterion", ctx.criterion_name},
                 {"omega", spec.omega},
                 {"p", spec.p},
                 {"k", spec.k}};
  doc["seed"] = ctx.seed;

  ordered_json points = ordered_json::array();
  for (std::size_t i = 0; i < set.points.size(); ++i) {
    const auto& pt = set.points[i];
    ordered_json jp;
    jp["T"] = matrix_to_json_array(pt.t);
    jp["lambda"] = matrix_to_json_array(pt.lambda);
    jp["q"] = pt.q_value;
    if (classified) {
      jp["label"] = to_string(classified->points[i].label);
    } else {
      jp["label"] = nullptr;
    }
    ordered_json res;
    res["orthogonality"] = pt.orth_residual;
    res["stationarity"] = pt.stat_residual;
    if (classified) res["multiplier"] = classified->points[i].multiplier_residual;
    jp["residuals"] = std::move(res);
    points.push_back(std::move(jp));
  }
  doc["points"] = std::move(points);

  ordered_json classes = ordered_json::array();
  for (std::size_t c = 0; c < set.classes.size(); ++c) {
    const auto& cls = set.classes[c];
    ordered_json jc;
    jc["members"] = cls.members;
    jc["representative"] = cls.representative;
    jc["q"] = cls.q_value;
    if (classified) {
      jc["label"] = to_string(classified->class_labels[c]);
    } else {
      jc["label"] = nullptr;
    }
    classes.push_back(std::move(jc));
  }
  doc["classes"] = std::move(classes);
  doc["global_class"] = set.global_class;
  doc["continuum_flag"] = set.continuum_flag;
  doc["paths"] = {{"tracked", set.n_paths_tracked},
                  {"converged", set.n_converged},
                  {"diverged", set.n_diverged},
                  {"truncated", set.n_truncated},
                  {"rejected", set.n_rejected}};
  return doc.dump(2) + "\n";
}

std::string records_to_csv(const std::vector<ReplicateRecord>& records) {
  std::string out =
      "schedule,stage,criterion,replicate,engine,q_value,perfect_rows,moderate_rows,"
      "zero_elements,dist_global,dist_nearest,n_max,n_min,n_indet,failed\n";
  for (const auto& r : records) {
    out += to_string(r.schedule);
    out += "," + std::to_string(r.stage);
    out += "," + r.criterion;
    out += "," + std::to_string(r.replicate);
    out += ",";
    out += to_string(r.engine);
    if (r.failed) {
      out += ",nan,nan,nan,nan";
    } else {
      out += "," + format_sig(r.q_value, 12);
      out += "," + std::to_string(r.counts.perfect_rows);
      out += "," + std::to_string(r.counts.moderate_rows);
      out += "," + std::to_string(r.counts.zero_elements);
    }
    out += "," + opt_cell(r.failed ? std::optional<double>{} : r.dist_global, 12);
    out += "," + opt_cell(r.failed ? std::optional<double>{} : r.dist_nearest, 12);
    out += "," + opt_cell(r.failed ? std::optional<int>{} : r.n_max);
    out += "," + opt_cell(r.failed ? std::optional<int>{} : r.n_min);
    out += "," + opt_cell(r.failed ? std::optional<int>{} : r.n_indet);
    out += r.failed ? ",1\n" : ",0\n";
  }
  return out;
}

std::string summaries_to_csv(const std::vector<StageSummary>& summaries) {
  std::string out =
      "schedule,stage,criterion,n_replicates,n_failed,mean_perfect_rows,mean_moderate_rows,"
      "mean_zero_elements,mean_dist_global,mean_dist_nearest,mean_n_max,mean_n_min,"
      "mean_n_indet\n";
  for (const auto& s : summaries) {
    out += to_string(s.schedule);
    out += "," + std::to_string(s.stage);
    out += "," + s.criterion;
    out += "," + std::to_string(s.n_replicates);
    out += "," + std::to_string(s.n_failed);
    out += "," + format_sig(s.mean_perfect_rows, 12);
    out += "," + format_sig(s.mean_moderate_rows, 12);
    out += "," + format_sig(s.mean_zero_elements, 12);
    out += "," + opt_cell(s.mean_dist_global, 12);
    out += "," + opt_cell(s.mean_dist_nearest, 12);
    out += "," + opt_cell(s.mean_n_max, 12);
    out += "," + opt_cell(s.mean_n_min, 12);
    out += "," + opt_cell(s.mean_n_indet, 12);
    out += "\n";
  }
  return out;
}

std::vector<StageSummary> parse_summaries_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("summaries csv: empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line, ',');
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const char* required : {"schedule", "stage", "criterion", "mean_perfect_rows",
                               "mean_moderate_rows", "mean_zero_elements"}) {
    if (!col.count(required)) {
      throw std::invalid_argument(std::string("summaries csv: missing column ") + required);
    }
  }

  std::vector<StageSummary> out;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != header.size()) throw std::invalid_argument("summaries csv: ragged row");
    auto cell = [&](const char* name) -> const std::string& {
      return cells[col.at(name)];
    };
    auto num = [&](const char* name) { return std::stod(cell(name)); };
    auto opt = [&](const char* name) -> std::optional<double> {
      if (!col.count(name)) return std::nullopt;
      const double v = std::stod(cell(name));
      if (std::isnan(v)) return std::nullopt;
      return v;
    };
    StageSummary s;
    s.schedule = cell("schedule") == "S" ? Schedule::S : Schedule::W;
    s.stage = static_cast<int>(num("stage"));
    s.criterion = cell("criterion");
    if (col.count("n_replicates")) s.n_replicates = static_cast<int>(num("n_replicates"));
    if (col.count("n_failed")) s.n_failed = static_cast<int>(num("n_failed"));
    s.mean_perfect_rows = num("mean_perfect_rows");
    s.mean_moderate_rows = num("mean_moderate_rows");
    s.mean_zero_elements = num("mean_zero_elements");
    s.mean_dist_global = opt("mean_dist_global");
    s.mean_dist_nearest = opt("mean_dist_nearest");
    s.mean_n_max = opt("mean_n_max");
    s.mean_n_min = opt("mean_n_min");
    s.mean_n_indet = opt("mean_n_indet");
    out.push_back(std::move(s));
  }
  return out;
}

std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<ChartSeries>& series) {
  const double width = 800, height = 500;
  const double left = 70, right = 640, top = 45, bottom = 450;

  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool any = false;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (std::isnan(s.y[i])) continue;
      if (!any) {
        xmin = xmax = s.x[i];
        ymin = ymax = s.y[i];
        any = true;
      } else {
        xmin = std::min(xmin, s.x[i]);
        xmax = std::max(xmax, s.x[i]);
        ymin = std::min(ymin, s.y[i]);
        ymax = std::max(ymax, s.y[i]);
      }
    }
  }
  if (xmax <= xmin) xmax = xmin + 1;
  if (ymax <= ymin) ymax = ymin + 1;
  // pad the y range so lines do not sit on the frame
  const double ypad = (ymax - ymin) * 0.08;
  ymin -= ypad;
  ymax += ypad;

  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (right - left); };
  auto py = [&](double y) { return bottom - (y - ymin) / (ymax - ymin) * (bottom - top); };
  auto fmt2 = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return std::string(buf);
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + format_sig(width, 6) +
         "\" height=\"" + format_sig(height, 6) + "\" viewBox=\"0 0 800 500\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"500\" fill=\"#ffffff\"/>\n";
  svg += "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">" + title + "</text>\n";
  // frame
  svg += "<rect x=\"" + fmt2(left) + "\" y=\"" + fmt2(top) + "\" width=\"" +
         fmt2(right - left) + "\" height=\"" + fmt2(bottom - top) +
         "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

  for (int tick = 0; tick <= 5; ++tick) {
    const double fx = xmin + (xmax - xmin) * tick / 5.0;
    const double fy = ymin + (ymax - ymin) * tick / 5.0;
    svg += "<line x1=\"" + fmt2(px(fx)) + "\" y1=\"" + fmt2(bottom) + "\" x2=\"" + fmt2(px(fx)) +
           "\" y2=\"" + fmt2(bottom + 5) + "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + fmt2(px(fx)) + "\" y=\"" + fmt2(bottom + 20) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
           format_sig(fx, 6) + "</text>\n";
    svg += "<line x1=\"" + fmt2(left - 5) + "\" y1=\"" + fmt2(py(fy)) + "\" x2=\"" + fmt2(left) +
           "\" y2=\"" + fmt2(py(fy)) + "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + fmt2(left - 9) + "\" y=\"" + fmt2(py(fy) + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
           format_sig(fy, 6) + "</text>\n";
  }
  svg += "<text x=\"" + fmt2((left + right) / 2) + "\" y=\"488\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"13\">" + x_label + "</text>\n";
  svg += "<text x=\"18\" y=\"" + fmt2((top + bottom) / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         "transform=\"rotate(-90 18 " + fmt2((top + bottom) / 2) + ")\">" + y_label +
         "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = chart_color(s.label, si);
    std::string pts;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (std::isnan(s.y[i])) continue;
      if (!pts.empty()) pts += " ";
      pts += fmt2(px(s.x[i])) + "," + fmt2(py(s.y[i]));
    }
    if (!pts.empty()) {
      svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
             "\" stroke-width=\"2\"/>\n";
    }
    const double ly = 60 + 22 * static_cast<double>(si);
    svg += "<line x1=\"655\" y1=\"" + fmt2(ly - 4) + "\" x2=\"685\" y2=\"" + fmt2(ly - 4) +
           "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"692\" y=\"" + fmt2(ly) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" + s.label + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::string manifest_json(const std::string& command, std::uint64_t seed, int threads,
                          const std::vector<ManifestEntry>& inputs,
                          const std::vector<ManifestEntry>& outputs) {
  ordered_json doc;
  doc["schema_version"] = 1;
  doc["command"] = command;
  doc["seed"] = seed;
  doc["threads"] = threads;
  doc["timestamp"] = timestamp_utc();
  auto entries = [](const std::vector<ManifestEntry>& v) {
    ordered_json arr = ordered_json::array();
    for (const auto& e : v) {
      arr.push_back({{"path", e.path}, {"fnv1a64", hash_hex(e.hash)}});
    }
    return arr;
  };
  doc["inputs"] = entries(inputs);
  doc["outputs"] = entries(outputs);
  return doc.dump(2) + "\n";
}

}  // namespace orthorot
