#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "qap/lap.hpp"

using namespace qap;

namespace {
double brute_force(const std::vector<double>& cost, int m) {
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double v = 0;
    for (int i = 0; i < m; ++i) v += cost[(size_t)i * m + perm[i]];
    best = std::min(best, v);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

void check_invariants(const std::vector<double>& cost, int m, const LapResult& r) {
  // assignment is a bijection
  std::vector<int> seen(m, 0);
  for (int i = 0; i < m; ++i) {
    REQUIRE(r.row_to_col[i] >= 0);
    REQUIRE(r.row_to_col[i] < m);
    seen[r.row_to_col[i]]++;
    CHECK(r.col_to_row[r.row_to_col[i]] == i);
  }
  for (int c : seen) CHECK(c == 1);
  // duals feasible, complementary on the assignment, strong duality
  double primal = 0, dual = 0;
  for (int i = 0; i < m; ++i) {
    primal += cost[(size_t)i * m + r.row_to_col[i]];
    dual += r.u[i] + r.v[i];
    for (int j = 0; j < m; ++j)
      CHECK(cost[(size_t)i * m + j] - r.u[i] - r.v[j] >= -1e-9);
    CHECK(std::abs(cost[(size_t)i * m + r.row_to_col[i]] - r.u[i] -
                   r.v[r.row_to_col[i]]) <= 1e-9);
  }
  CHECK(primal == doctest::Approx(r.value));
  CHECK(dual == doctest::Approx(r.value));
}
}  // namespace

TEST_CASE("trivial LAPs") {
  auto r1 = solve_lap(std::vector<double>{5}, 1);
  CHECK(r1.value == doctest::Approx(5));

  // [[1,2],[3,0]] -> rows take (0,0) and (1,1): 1 + 0 = 1
  auto r2 = solve_lap(std::vector<double>{1, 2, 3, 0}, 2);
  CHECK(r2.value == doctest::Approx(1));
  CHECK(r2.row_to_col == std::vector<int>{0, 1});
}

TEST_CASE("ties break toward the lowest column") {
  // all-equal costs -> identity assignment
  std::vector<double> cost(16, 3.0);
  auto r = solve_lap(cost, 4);
  CHECK(r.row_to_col == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("oracle equivalence on seeded instances m<=8") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    int m = 1 + (int)(rng() % 8);
    std::vector<double> cost((size_t)m * m);
    for (auto& c : cost) c = (double)(rng() % 100) - 20.0;  // negatives too
    auto r = solve_lap(cost, m);
    INFO("trial ", trial, " m ", m);
    CHECK(r.value == doctest::Approx(brute_force(cost, m)));
    check_invariants(cost, m, r);
  }
}

TEST_CASE("cost shift invariance") {
  std::mt19937_64 rng(7);
  int m = 6;
  std::vector<double> cost((size_t)m * m);
  for (auto& c : cost) c = (double)(rng() % 50);
  auto base = solve_lap(cost, m);
  // add alpha_i to row i and beta_j to col j: optimum shifts by sum(alpha+beta),
  // assignment unchanged
  std::vector<double> shifted = cost;
  double total = 0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) shifted[(size_t)i * m + j] += i * 1.5 + j * 0.25;
  for (int i = 0; i < m; ++i) total += i * 1.5 + i * 0.25;
  auto r = solve_lap(shifted, m);
  CHECK(r.value == doctest::Approx(base.value + total));
  CHECK(r.row_to_col == base.row_to_col);
}

TEST_CASE("LapSolver workspace reuse matches one-shot calls") {
  LapSolver solver(8);
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    int m = 2 + (int)(rng() % 7);
    std::vector<double> cost((size_t)m * m);
    for (auto& c : cost) c = (double)(rng() % 1000);
    std::vector<int> rc(m), cr(m);
    std::vector<double> u(m), v(m);
    double val = solver.solve(cost.data(), m, rc.data(), cr.data(), u.data(),
                              v.data());
    auto ref = solve_lap(cost, m);
    CHECK(val == doctest::Approx(ref.value));
    CHECK(rc == ref.row_to_col);
  }
}

TEST_CASE("batch: parallel identical to serial for any worker count") {
  std::mt19937_64 rng(5);
  LapBatch base;
  base.resize(64, 9);
  for (auto& c : base.costs) c = (double)(rng() % 500);

  LapBatch ser = base;
  solve_batch_serial(ser);
  for (int w : {1, 2, 4, 8}) {
    LapBatch par = base;
    solve_batch(par, w);
    CHECK(par.values == ser.values);
    CHECK(par.row_to_col == ser.row_to_col);
    CHECK(par.u == ser.u);
    CHECK(par.v == ser.v);
  }
}

TEST_CASE("batch slots are independent") {
  LapBatch b;
  b.resize(2, 2);
  // slot 0: [[1,2],[3,0]] -> 1 ; slot 1: [[0,9],[9,0]] -> 0
  double c0[] = {1, 2, 3, 0}, c1[] = {0, 9, 9, 0};
  std::copy(c0, c0 + 4, b.cost(0));
  std::copy(c1, c1 + 4, b.cost(1));
  solve_batch(b, 2);
  CHECK(b.values[0] == doctest::Approx(1));
  CHECK(b.values[1] == doctest::Approx(0));
}
