// Quadratic assignment problem instances: QAPLIB-format I/O, random
// generation, objective evaluation.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qap {

// Lawler-form QAP data: minimize sum_ip b[i][p] x_ip + sum f[i][j] d[p][q]
// x_ip x_jq over permutation matrices x.  All matrices are n*n, row-major.
struct QapInstance {
  int n = 0;
  std::vector<double> flow;    // f[i*n+j]
  std::vector<double> dist;    // d[p*n+q]
  std::vector<double> linear;  // b[i*n+p], zero unless a third matrix is given
  std::string name;

  double f(int i, int j) const { return flow[(size_t)i * n + j]; }
  double d(int p, int q) const { return dist[(size_t)p * n + q]; }
  double b(int i, int p) const { return linear[(size_t)i * n + p]; }
};

// Objective value of a permutation (perm[i] = location of facility i).
double evaluate_objective(const QapInstance& inst, const std::vector<int>& perm);

// Parse QAPLIB .dat text: n, then two (optionally three) n*n matrices,
// whitespace-separated.  First matrix is flow unless swap_order is set.
QapInstance parse_qaplib(const std::string& text, bool swap_order = false,
                         const std::string& name = "");
QapInstance load_qaplib_file(const std::string& path, bool swap_order = false);

// Parse a QAPLIB .sln file: "n value" then a permutation (1-based in the
// file, returned 0-based).  Returns the reported objective through *value.
std::vector<int> parse_solution(const std::string& text, int expect_n,
                                double* value);
std::vector<int> load_solution_file(const std::string& path, int expect_n,
                                    double* value);

std::string format_qaplib(const QapInstance& inst);

// Seeded random instance: symmetric flow and distance with zero diagonal,
// integer entries in [0, max_entry].  Same seed gives the same instance on
// every platform.
QapInstance generate_instance(int n, std::uint64_t seed, int max_entry = 99);

// A manifest line: path, optional swap flag, optional known optimum.
struct ManifestEntry {
  std::string path;
  bool swap_order = false;
  double best_known = -1;  // negative when unknown
  std::string sln_path;
};
std::vector<ManifestEntry> parse_manifest(const std::string& text);
std::vector<ManifestEntry> load_manifest_file(const std::string& path);

}  // namespace qap
