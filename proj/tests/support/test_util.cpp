#include "support/test_util.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace testutil {

orthorot::Mat random_matrix(std::uint64_t seed, std::uint64_t stream, Eigen::Index rows,
                            Eigen::Index cols) {
  orthorot::RngStream rng(seed, stream, 0xfe);
  orthorot::Mat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.uniform_sym();
  }
  return m;
}

orthorot::Mat random_orthogonal(std::uint64_t seed, std::uint64_t stream, Eigen::Index k) {
  return orthorot::svd_polar_factor(random_matrix(seed, stream, k, k));
}

std::string cli_binary() {
  const char* p = std::getenv("ORTHOROT_BIN");
  return p ? p : "";
}

std::string golden_dir() {
  const char* p = std::getenv("ORTHOROT_TEST_DATA");
  return p ? p : "";
}

std::string scratch_dir(const std::string& tag) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("orthorot_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

CliResult run_cli(const std::string& args) {
  const std::string bin = cli_binary();
  if (bin.empty()) throw std::runtime_error("ORTHOROT_BIN is not set");
  CliResult res;
  const std::string cmd = bin + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) throw std::runtime_error("popen failed");
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) res.output.append(buf, n);
  const int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace testutil
