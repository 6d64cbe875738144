#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "orthorot/classifier.hpp"
#include "orthorot/homotopy.hpp"
#include "orthorot/matrix.hpp"
#include "orthorot/simulation.hpp"

namespace orthorot {

/// snprintf("%.<sig>g") with nan/inf spelled "nan"/"inf".
std::string format_sig(double x, int significant);

/// FNV-1a 64-bit over raw bytes.
std::uint64_t fnv1a64(const std::string& bytes);
std::string hash_hex(std::uint64_t h);

// ---- matrix files ----
// CSV: one row per line, comma separated, no header, 17 significant digits
// (lossless for doubles). JSON: array of row arrays. read_matrix dispatches
// on the .json extension, everything else is CSV.
Mat parse_matrix_csv(const std::string& text);
Mat parse_matrix_json(const std::string& text);
std::string matrix_to_csv(const Mat& m);
Mat read_matrix(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// ---- solver results document ----
struct ResultsContext {
  std::string input_path;
  std::uint64_t input_hash = 0;
  std::string criterion_name;
  std::uint64_t seed = 0;
};

/// Deterministic JSON document with points, classes, and path diagnostics;
/// labels come from `classified` when given, else serialize as null.
std::string results_to_json(const StationarySet& set, const ClassifiedSet* classified,
                            const Mat& a, const OrthomaxSpec& spec,
                            const ResultsContext& ctx);

// ---- simulation CSV ----
std::string records_to_csv(const std::vector<ReplicateRecord>& records);
std::string summaries_to_csv(const std::vector<StageSummary>& summaries);
std::vector<StageSummary> parse_summaries_csv(const std::string& text);

// ---- figures ----
struct ChartSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;  // nan = gap
};

/// Self-contained deterministic SVG line chart (fixed 800 x 500 layout).
std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<ChartSeries>& series);

// ---- run manifest ----
struct ManifestEntry {
  std::string path;
  std::uint64_t hash = 0;
};

/// Records what a command read and wrote. The timestamp honors
/// SOURCE_DATE_EPOCH so seeded reruns can be byte-identical.
std::string manifest_json(const std::string& command, std::uint64_t seed, int threads,
                          const std::vector<ManifestEntry>& inputs,
                          const std::vector<ManifestEntry>& outputs);

}  // namespace orthorot
