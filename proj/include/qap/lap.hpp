// Dense linear assignment: alternating-tree Hungarian (shortest augmenting path)
// solver returning primal assignment and dual potentials, plus a batch
// interface with OpenMP-parallel and serial reference paths.
#pragma once

#include <vector>

namespace qap {

struct LapResult {
  double value = 0;            // optimal assignment cost == sum(u)+sum(v)
  std::vector<int> row_to_col; // assignment[row] = col
  std::vector<int> col_to_row;
  std::vector<double> u, v;    // duals: cost[r][c] - u[r] - v[c] >= 0
};

// Solve an m*m dense LAP given row-major costs.  Deterministic: ties break
// toward the lowest column index.
LapResult solve_lap(const double* cost, int m);
LapResult solve_lap(const std::vector<double>& cost, int m);

// Reusable workspace to avoid per-call allocation in hot loops.
class LapSolver {
 public:
  explicit LapSolver(int max_m = 0) { reserve(max_m); }
  void reserve(int m);
  // Solves in place; outputs are sized m.  Returns the optimum.
  double solve(const double* cost, int m, int* row_to_col, int* col_to_row,
               double* u, double* v);

 private:
  std::vector<double> minv_;
  std::vector<int> way_, used_; // used_ doubles as a marker array
};

// One batch slot: contiguous cost matrix and per-slot outputs.
struct LapBatch {
  int m = 0;                 // all slots share a dimension
  int count = 0;
  std::vector<double> costs; // count * m * m
  std::vector<double> values;
  std::vector<int> row_to_col, col_to_row; // count * m each
  std::vector<double> u, v;                // count * m each

  void resize(int count_, int m_);
  double* cost(int s) { return costs.data() + (size_t)s * m * m; }
  const double* cost(int s) const { return costs.data() + (size_t)s * m * m; }
};

// Solve every slot independently.  The parallel path distributes slots over
// OpenMP threads; results are written to disjoint slots so the outcome is
// bitwise identical for any worker count.
void solve_batch(LapBatch& batch, int workers);
void solve_batch_serial(LapBatch& batch);  // reference path for testing

}  // namespace qap
