// Exact QAP solving: best-first-seeded, depth-first-executed parallel
// branch-and-bound over polytomic facility-placement nodes, bounded by the
// RLT2 dual-ascent engine with warm starts, grid-symmetry elimination,
// depth capping, and load rebalancing across worker banks.
#pragma once

#include <cstdint>
#include <deque>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "qap/instance.hpp"
#include "qap/rlt2.hpp"

namespace qap {

struct BnbNode {
  int level = 0;                                // number of fixed facilities
  std::vector<std::pair<int, int>> fixed;       // (facility, location)
  double bound = -std::numeric_limits<double>::infinity();
  std::uint64_t id = 0;
  int seed_level = 0;                           // level of the seed this DFS grew from
  // Parent's folded coefficient store over the parent's free sets (sorted
  // ascending by original index); null means bound cold.
  std::shared_ptr<const CoefficientStore> warm_ref;
  // Own snapshot taken after bounding, handed to children as warm_ref.
  std::shared_ptr<const CoefficientStore> own_store;
  bool bounded = false;
};

struct BnbConfig {
  int banks = 1;                // N node-processing threads
  int workers_per_bank = 1;     // K LAP workers inside each engine
  int l_init = 0;
  int branch_rule = 1;
  int max_depth = 5;            // warm-snapshot depth below the seed level
  int early_stop_window = 25;
  double early_stop_delta = 0.0002;
  double rebalance_period = 300.0;  // seconds; empty queues also trigger
  int node_iter_limit = 500;
  bool symmetry_elimination = true;
  double incumbent = std::numeric_limits<double>::infinity();
  std::vector<int> incumbent_perm;  // optional certificate for the incumbent
  Variant variant = Variant::F1;    // interior bounding variant
  bool sa_enabled = true;
  bool snapshot_pass = true;    // extra S1 pass to produce warm-start stores
  int enumerate_threshold = 4;  // free count <= this -> exhaustive completion
  std::uint64_t seed = 0;
  std::string log_path;         // JSON-lines node events, empty disables
};

struct BnbResult {
  double value = std::numeric_limits<double>::infinity();
  std::vector<int> permutation;
  double root_bound = -std::numeric_limits<double>::infinity();
  long nodes_explored = 0;
  long nodes_seeded = 0;
  long nodes_fathomed = 0;
  double wall_seconds = 0;
  std::vector<double> bank_utilization;  // busy / wall per bank
  bool certified = false;  // permutation evaluates to value

  std::string to_json() const;
};

// Rule 1: identity.  Rule 2: greedy max total interaction (row+column flow
// sums, then pairwise interaction with the placed set).  Rule 3: same with
// minimization.  Ties break toward the lowest index.
std::vector<int> branching_order(const QapInstance& inst, int rule);

// Automorphisms of a rectangular-grid distance matrix (Nugent family);
// maps is empty when the instance has no grid structure.
struct GridSymmetry {
  int rows = 0, cols = 0;
  std::vector<std::vector<int>> maps;  // each a permutation of locations
  bool found() const { return !maps.empty(); }
};
GridSymmetry detect_grid_symmetry(const QapInstance& inst);

// All placements of the first `depth` facilities in `order` onto distinct
// locations, minus grid-symmetry duplicates (stabilizer-orbit
// representatives).  depth = 0 yields the single empty assignment.
std::vector<std::vector<std::pair<int, int>>> seed_assignments(
    int n, const std::vector<int>& order, int depth, const GridSymmetry& sym);

// Pool every queue, order by ascending bound, and deal round-robin; the
// node multiset is preserved exactly.
void rebalance(std::vector<std::deque<BnbNode>>& queues);

BnbResult branch_and_bound(const QapInstance& inst, const BnbConfig& cfg);

}  // namespace qap
