#include "qap/lap.hpp"

#include <omp.h>

#include <limits>
#include <stdexcept>

namespace qap {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void LapSolver::reserve(int m) {
  if (m <= 0) return;
  minv_.reserve(m + 1);
  way_.reserve(m + 1);
  used_.reserve(2 * (m + 1));
}

// Shortest-augmenting-path assignment with dual potentials.  Column m is a
// virtual start column.  On return: cost[r][c] - u[r] - v[c] >= 0 everywhere
// and == 0 on matched pairs, so sum(u) + sum(v) equals the optimum.
double LapSolver::solve(const double* cost, int m, int* row_to_col,
                        int* col_to_row, double* u, double* v) {
  if (m <= 0) throw std::invalid_argument("lap: m must be positive");
  minv_.assign(m + 1, 0.0);
  way_.assign(m + 1, -1);
  used_.assign(m + 1, 0);
  std::vector<int> p(m + 1, -1);  // p[j] = row matched to column j
  std::vector<double> uu(m, 0.0), vv(m + 1, 0.0);

  for (int i = 0; i < m; ++i) {
    p[m] = i;
    int j0 = m;
    for (int j = 0; j <= m; ++j) {
      minv_[j] = kInf;
      used_[j] = 0;
    }
    do {
      used_[j0] = 1;
      const int i0 = p[j0];
      const double* row = cost + (size_t)i0 * m;
      int j1 = -1;
      double delta = kInf;
      for (int j = 0; j < m; ++j) {
        if (used_[j]) continue;
        const double cur = row[j] - uu[i0] - vv[j];
        if (cur < minv_[j]) {
          minv_[j] = cur;
          way_[j] = j0;
        }
        if (minv_[j] < delta) {
          delta = minv_[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used_[j]) {
          uu[p[j]] += delta;
          vv[j] -= delta;
        } else {
          minv_[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != -1);
    do {
      const int j1 = way_[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != m);
  }

  double value = 0;
  for (int j = 0; j < m; ++j) {
    col_to_row[j] = p[j];
    row_to_col[p[j]] = j;
    value += cost[(size_t)p[j] * m + j];
  }
  for (int i = 0; i < m; ++i) u[i] = uu[i];
  for (int j = 0; j < m; ++j) v[j] = vv[j];
  return value;
}

LapResult solve_lap(const double* cost, int m) {
  LapResult r;
  r.row_to_col.resize(m);
  r.col_to_row.resize(m);
  r.u.resize(m);
  r.v.resize(m);
  LapSolver s(m);
  r.value = s.solve(cost, m, r.row_to_col.data(), r.col_to_row.data(),
                    r.u.data(), r.v.data());
  return r;
}

LapResult solve_lap(const std::vector<double>& cost, int m) {
  if ((int)cost.size() != m * m)
    throw std::invalid_argument("lap: cost size != m*m");
  return solve_lap(cost.data(), m);
}

void LapBatch::resize(int count_, int m_) {
  m = m_;
  count = count_;
  costs.assign((size_t)count * m * m, 0.0);
  values.assign(count, 0.0);
  row_to_col.assign((size_t)count * m, -1);
  col_to_row.assign((size_t)count * m, -1);
  u.assign((size_t)count * m, 0.0);
  v.assign((size_t)count * m, 0.0);
}

static void solve_slot(LapBatch& b, LapSolver& solver, int s) {
  const size_t off = (size_t)s * b.m;
  b.values[s] =
      solver.solve(b.cost(s), b.m, b.row_to_col.data() + off,
                   b.col_to_row.data() + off, b.u.data() + off, b.v.data() + off);
}

void solve_batch_serial(LapBatch& batch) {
  LapSolver solver(batch.m);
  for (int s = 0; s < batch.count; ++s) solve_slot(batch, solver, s);
}

void solve_batch(LapBatch& batch, int workers) {
  if (workers <= 1) {
    solve_batch_serial(batch);
    return;
  }
#pragma omp parallel num_threads(workers)
  {
    LapSolver solver(batch.m);
#pragma omp for schedule(static)
    for (int s = 0; s < batch.count; ++s) solve_slot(batch, solver, s);
  }
}

}  // namespace qap
