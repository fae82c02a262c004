#include "qap/instance.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace qap {

double evaluate_objective(const QapInstance& inst, const std::vector<int>& perm) {
  const int n = inst.n;
  if ((int)perm.size() != n) throw std::invalid_argument("perm size != n");
  std::vector<char> seen(n, 0);
  for (int i = 0; i < n; ++i) {
    if (perm[i] < 0 || perm[i] >= n || seen[perm[i]])
      throw std::invalid_argument("not a permutation");
    seen[perm[i]] = 1;
  }
  double v = 0;
  for (int i = 0; i < n; ++i) {
    v += inst.b(i, perm[i]);
    for (int j = 0; j < n; ++j) v += inst.f(i, j) * inst.d(perm[i], perm[j]);
  }
  return v;
}

static std::vector<double> read_block(std::istringstream& in, int count,
                                      const char* what) {
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i)
    if (!(in >> out[i]))
      throw std::runtime_error(std::string("truncated input reading ") + what);
  return out;
}

QapInstance parse_qaplib(const std::string& text, bool swap_order,
                         const std::string& name) {
  std::istringstream in(text);
  QapInstance inst;
  inst.name = name;
  if (!(in >> inst.n) || inst.n <= 0)
    throw std::runtime_error("bad instance size");
  const int nn = inst.n * inst.n;
  std::vector<double> a = read_block(in, nn, "first matrix");
  std::vector<double> b = read_block(in, nn, "second matrix");
  inst.flow = swap_order ? std::move(b) : std::move(a);
  inst.dist = swap_order ? std::move(a) : std::move(b);
  // Optional third matrix: explicit linear costs.
  double probe;
  if (in >> probe) {
    inst.linear.resize(nn);
    inst.linear[0] = probe;
    for (int i = 1; i < nn; ++i)
      if (!(in >> inst.linear[i]))
        throw std::runtime_error("truncated linear-cost matrix");
  } else {
    inst.linear.assign(nn, 0.0);
  }
  return inst;
}

static std::string slurp(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

static std::string basename_no_ext(const std::string& path) {
  size_t slash = path.find_last_of('/');
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  size_t dot = base.find_last_of('.');
  return dot == std::string::npos ? base : base.substr(0, dot);
}

QapInstance load_qaplib_file(const std::string& path, bool swap_order) {
  return parse_qaplib(slurp(path), swap_order, basename_no_ext(path));
}

std::vector<int> parse_solution(const std::string& text, int expect_n,
                                double* value) {
  std::istringstream in(text);
  int n;
  double v;
  if (!(in >> n >> v)) throw std::runtime_error("bad solution header");
  if (n != expect_n) throw std::runtime_error("solution size mismatch");
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) {
    if (!(in >> perm[i])) throw std::runtime_error("truncated permutation");
    perm[i] -= 1;
  }
  std::vector<char> seen(n, 0);
  for (int p : perm) {
    if (p < 0 || p >= n || seen[p])
      throw std::runtime_error("solution is not a permutation");
    seen[p] = 1;
  }
  if (value) *value = v;
  return perm;
}

std::vector<int> load_solution_file(const std::string& path, int expect_n,
                                    double* value) {
  return parse_solution(slurp(path), expect_n, value);
}

std::string format_qaplib(const QapInstance& inst) {
  std::ostringstream out;
  out << inst.n << "\n\n";
  auto emit = [&](const std::vector<double>& m) {
    for (int i = 0; i < inst.n; ++i) {
      for (int j = 0; j < inst.n; ++j) {
        double v = m[(size_t)i * inst.n + j];
        if (j) out << ' ';
        if (v == std::floor(v))
          out << (long long)v;
        else
          out << v;
      }
      out << "\n";
    }
    out << "\n";
  };
  emit(inst.flow);
  emit(inst.dist);
  return out.str();
}

QapInstance generate_instance(int n, std::uint64_t seed, int max_entry) {
  if (n < 2) throw std::invalid_argument("n must be >= 2");
  QapInstance inst;
  inst.n = n;
  inst.flow.assign((size_t)n * n, 0.0);
  inst.dist.assign((size_t)n * n, 0.0);
  inst.linear.assign((size_t)n * n, 0.0);
  inst.name = "rand" + std::to_string(n) + "-" + std::to_string(seed);
  std::mt19937_64 rng(seed);
  // Explicit modulo rather than a distribution so the stream is identical
  // across standard library implementations.
  auto draw = [&]() { return (double)(rng() % (std::uint64_t)(max_entry + 1)); };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      inst.flow[(size_t)i * n + j] = inst.flow[(size_t)j * n + i] = draw();
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q)
      inst.dist[(size_t)p * n + q] = inst.dist[(size_t)q * n + p] = draw();
  return inst;
}

std::vector<ManifestEntry> parse_manifest(const std::string& text) {
  std::vector<ManifestEntry> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    size_t h = line.find('#');
    if (h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    ManifestEntry e;
    if (!(ls >> e.path)) continue;
    std::string tok;
    while (ls >> tok) {
      if (tok == "swap")
        e.swap_order = true;
      else if (tok.rfind("opt=", 0) == 0)
        e.best_known = std::stod(tok.substr(4));
      else if (tok.rfind("sln=", 0) == 0)
        e.sln_path = tok.substr(4);
      else
        throw std::runtime_error("unknown manifest token: " + tok);
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<ManifestEntry> load_manifest_file(const std::string& path) {
  auto entries = parse_manifest(slurp(path));
  // relative entry paths resolve against the manifest's directory
  std::string dir;
  size_t slash = path.find_last_of('/');
  if (slash != std::string::npos) dir = path.substr(0, slash + 1);
  for (auto& e : entries) {
    if (!e.path.empty() && e.path[0] != '/') e.path = dir + e.path;
    if (!e.sln_path.empty() && e.sln_path[0] != '/') e.sln_path = dir + e.sln_path;
  }
  return entries;
}

}  // namespace qap
