// RLT2 Lagrangian dual-ascent engine: coefficient store (b', C', D' with
// half-Z storage), three-stage LAP decomposition (Z -> Y -> X), ascent rules
// Types 1-4, F/S and 1-/2-phase variants, complementary-slackness
// feasibility check.
#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "qap/instance.hpp"

namespace qap {

enum class Variant { F1, F2, S1, S2 };
const char* variant_name(Variant v);
Variant parse_variant(const std::string& s);

// Index arithmetic for the half-Z coefficient layout: one tile per
// (i<j, p!=q) quadruple, each tile an (n-2)x(n-2) matrix over the free
// (facility, location) cells.
struct StoreIndex {
  int m = 0;
  int fpairs = 0;   // m*(m-1)/2 unordered facility pairs, i<j
  int lpairs = 0;   // m*(m-1) ordered location pairs, p!=q
  int tiles = 0;    // fpairs * lpairs
  int esz = 0;      // (m-2)*(m-2) cells per tile
  std::vector<int> fp_i, fp_j;  // facility pair id -> (i, j)
  std::vector<int> lp_p, lp_q;  // location pair id -> (p, q)

  StoreIndex() = default;
  explicit StoreIndex(int m_);

  int fpair(int i, int j) const {  // requires i < j
    return i * m - i * (i + 1) / 2 + (j - i - 1);
  }
  int lpair(int p, int q) const {  // requires p != q
    return p * (m - 1) + q - (q > p);
  }
  int tile(int i, int j, int p, int q) const {
    return fpair(i, j) * lpairs + lpair(p, q);
  }
  // local cell index of (k, r) inside tile (i, j, p, q)
  int cell(int i, int j, int p, int q, int k, int r) const {
    const int kl = k - (k > i) - (k > j);
    const int lo = p < q ? p : q, hi = p < q ? q : p;
    const int rl = r - (r > lo) - (r > hi);
    return kl * (m - 2) + rl;
  }
  // recover (k, r) from a local cell index of tile (i, j, p, q)
  void uncell(int i, int j, int p, int q, int c, int* k, int* r) const {
    int kk = c / (m - 2), rr = c % (m - 2);
    if (kk >= i) ++kk;
    if (kk >= j) ++kk;
    const int lo = p < q ? p : q, hi = p < q ? q : p;
    if (rr >= lo) ++rr;
    if (rr >= hi) ++rr;
    *k = kk;
    *r = rr;
  }
  // C' layout: full ordered storage, one (m-1)x(m-1) matrix per (i, p)
  size_t cidx(int i, int p, int j, int q) const {
    return ((size_t)i * m + p) * (m - 1) * (m - 1) +
           (size_t)(j - (j > i)) * (m - 1) + (q - (q > p));
  }
};

// Mutable b'/C'/D' arrays into which all dual multipliers are folded.
struct CoefficientStore {
  int m = 0;
  StoreIndex idx;
  std::vector<double> b;  // m*m
  std::vector<double> c;  // m*m*(m-1)*(m-1), ordered pairs
  std::vector<double> d;  // tiles*esz, half set i<j only
  double offset = 0;      // constant term accumulated by node restriction

  double* tile(int t) { return d.data() + (size_t)t * idx.esz; }
  const double* tile(int t) const { return d.data() + (size_t)t * idx.esz; }
};

// Algorithm step 1(b): b' = b (+ folded diagonal products), C'_ijpq =
// f_ij * d_pq, D' = 0.  Requires n >= 3.
CoefficientStore init_coefficients(const QapInstance& inst);

// Sum of the store's coefficients along a permutation; equals
// evaluate_objective + offset at initialization and is preserved by every
// ascent transfer (used as an exactness oracle in tests).
double store_evaluate(const CoefficientStore& st, const std::vector<int>& perm);

// Restrict a store by fixing (facility fac, location loc), both local
// indices; returns the (m-1)-sized store with linear terms folded into b
// and the fixed assignment's cost folded into offset.
CoefficientStore collapse_store(const CoefficientStore& st, int fac, int loc);

struct AscentConfig {
  Variant variant = Variant::F1;
  bool sa_enabled = false;
  int iter_limit = 100;
  double min_gap = 0.0;         // relative gap threshold, 0 disables
  double kappa_z_upper = 2.0 / 3.0;
  double phi_split = 0.5;
  double kappa_y = 1.0;
  double kappa_x = 1.0;
  double varphi = 0.5;
  double sa_t0_fraction = 0.04;
  double sa_kappa_lb_cap = 0.25;
  double sa_cool_factor = 0.99;
  int sa_cool_period = 100;
  int workers = 1;
  std::uint64_t seed = 0;
  double upper_bound = std::numeric_limits<double>::infinity();
  // branch-and-bound hooks: stop as soon as the bound proves a node
  // fathomable, or when improvement stalls
  double fathom_threshold = std::numeric_limits<double>::infinity();
  int early_stop_window = 0;    // 0 disables
  double early_stop_delta = 0.0002;
  bool record_history = true;
};

struct IterationRecord {
  int iteration = 0;
  double bound = 0;
  double gap = 0;
  double z_ms = 0, y_ms = 0, x_ms = 0;
};

struct BoundReport {
  std::string instance;
  std::string variant;
  bool sa_enabled = false;
  double best_bound = -std::numeric_limits<double>::infinity();
  double upper_bound = std::numeric_limits<double>::infinity();
  double gap = std::numeric_limits<double>::infinity();
  std::string termination;  // iteration-limit | gap-closed | feasible-found | early-stop
  int iterations = 0;
  std::vector<int> certificate;  // optimal permutation when feasible-found
  double certificate_value = 0;
  double wall_ms = 0;
  std::vector<IterationRecord> records;

  std::string to_json() const;
  std::string to_csv() const;
};

// Dual-ascent driver over a coefficient store.  One instance per run; not
// shareable across threads, but internally distributes LAP tiles over
// cfg.workers.
class AscentEngine {
 public:
  AscentEngine(CoefficientStore store, const AscentConfig& cfg);

  // One full iteration: ascent_update -> stage_z [-> phase 2] -> stage_y ->
  // stage_x [-> sa_perturb].  Returns this iteration's bound (with offset).
  double iterate();
  // Iterate until a termination condition fires; fills the report.
  BoundReport run();

  double best_bound() const { return best_; }
  double gap() const;
  int iteration() const { return iter_; }
  const CoefficientStore& store() const { return st_; }
  // Warm-start snapshot: folded coefficients only (S variants); calling it
  // on an F variant is a contract violation per the warm-start policy.
  CoefficientStore snapshot() const;
  bool has_certificate() const { return !cert_.empty(); }
  const std::vector<int>& certificate() const { return cert_; }
  double certificate_value() const { return cert_val_; }
  const std::vector<int>& x_assignment() const { return xrow_; }
  // Last-iteration slack arrays, exposed for property tests.
  const std::vector<double>& pi_z() const { return piz_; }
  const std::vector<double>& pi_y() const { return piy_; }
  const std::vector<double>& pi_x() const { return pix_; }

 private:
  void ascent_update();
  void stage_z();
  void stage_z_second_phase(std::vector<double>& costs,
                            const std::vector<double>& phase1_theta);
  void stage_y();
  void stage_x();
  bool feasibility_check();
  void sa_perturb();
  bool is_fast() const { return cfg_.variant == Variant::F1 || cfg_.variant == Variant::F2; }
  bool is_two_phase() const { return cfg_.variant == Variant::F2 || cfg_.variant == Variant::S2; }

  CoefficientStore st_;
  AscentConfig cfg_;
  int m_;
  int iter_ = 0;
  double best_ = -std::numeric_limits<double>::infinity();
  double running_ = 0;  // F variants: accumulated captured mass
  double last_bound_ = 0;
  std::vector<double> theta_;         // per tile, current iteration
  std::vector<double> delta_;         // m*m
  std::vector<double> piz_, piy_, pix_;
  std::vector<double> ybar_;          // per tile, equalized y slack
  std::vector<double> dx_;            // m*m, x-level push-down mass
  std::vector<double> push_;          // per tile, per-cell push-down share
  std::vector<double> incz_;          // F variants: incremental z costs
  std::vector<double> ycost_, xcost_; // stage scratch
  std::vector<double> zu_, zv_;       // z dual scratch, tiles*(m-2) each
  std::vector<int> zrow_, zcol_;      // z assignment scratch
  std::vector<int> xrow_, xcol_;
  std::vector<int> cert_;
  double cert_val_ = 0;
  std::mt19937_64 rng_;
  double temp_ = 0;
  std::vector<double> sa_fac_, sa_loc_;  // accepted kappa amounts (units), pending fold
  IterationRecord rec_;
};

// Phase-2 slack redistribution for one six-variable family: three stored
// slots with slacks pi[0..2] plus `virtual_slots` zero-slack lower-order
// slots.  Writes the stored slots' coefficient deltas to add[0..2]; returns
// false (no-op) when every slot is slack-positive and no binding slot
// exists to receive mass.
bool redistribute_family(const double pi[3], double add[3],
                         int virtual_slots = 3, double tol = 1e-9);

// Convenience driver matching the spec's run_ascent operation.
BoundReport run_ascent(const QapInstance& inst, const AscentConfig& cfg);
BoundReport run_ascent_warm(CoefficientStore warm, const AscentConfig& cfg);

}  // namespace qap
