// Batch-LAP throughput check: parallel batch vs serial reference on the
// same seeded costs; verifies objective identity before reporting timings.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <vector>

#include "qap/lap.hpp"

int main(int argc, char** argv) {
  int m = argc > 1 ? std::atoi(argv[1]) : 18;
  int count = argc > 2 ? std::atoi(argv[2]) : 2000;
  int workers = argc > 3 ? std::atoi(argv[3]) : 4;
  std::uint64_t seed = argc > 4 ? std::strtoull(argv[4], nullptr, 10) : 0;

  qap::LapBatch par, ser;
  par.resize(count, m);
  std::mt19937_64 rng(seed);
  for (auto& c : par.costs) c = (double)(rng() % 10000);
  ser = par;

  auto t0 = std::chrono::steady_clock::now();
  qap::solve_batch(par, workers);
  auto t1 = std::chrono::steady_clock::now();
  qap::solve_batch_serial(ser);
  auto t2 = std::chrono::steady_clock::now();

  for (int s = 0; s < count; ++s) {
    if (std::abs(par.values[s] - ser.values[s]) > 1e-9) {
      std::fprintf(stderr, "mismatch at slot %d: %.12f vs %.12f\n", s,
                   par.values[s], ser.values[s]);
      return 1;
    }
  }

  double par_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  double ser_ms = std::chrono::duration<double, std::milli>(t2 - t1).count();
  std::printf("m=%d count=%d workers=%d\n", m, count, workers);
  std::printf("parallel %.2f ms  serial %.2f ms  speedup %.2fx\n", par_ms,
              ser_ms, ser_ms / (par_ms > 0 ? par_ms : 1e-9));
  return 0;
}
