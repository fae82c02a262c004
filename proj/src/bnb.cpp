#include "qap/bnb.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <fstream>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace qap {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
using Clock = std::chrono::steady_clock;
}  // namespace

std::vector<int> branching_order(const QapInstance& inst, int rule) {
  const int n = inst.n;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (rule == 1) return order;
  if (rule != 2 && rule != 3)
    throw std::invalid_argument("branch rule must be 1, 2 or 3");
  const bool maximize = (rule == 2);
  std::vector<double> total(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) total[i] += inst.f(i, j) + inst.f(j, i);
  std::vector<char> placed(n, 0);
  std::vector<int> out;
  for (int step = 0; step < n; ++step) {
    int pick = -1;
    double score = 0;
    for (int i = 0; i < n; ++i) {
      if (placed[i]) continue;
      double s = 0;
      if (step == 0) {
        s = total[i];
      } else {
        for (int j : out) s += inst.f(i, j) + inst.f(j, i);
      }
      if (pick < 0 || (maximize ? s > score : s < score)) {
        pick = i;
        score = s;
      }
    }
    placed[pick] = 1;
    out.push_back(pick);
  }
  return out;
}

GridSymmetry detect_grid_symmetry(const QapInstance& inst) {
  const int n = inst.n;
  GridSymmetry sym;
  for (int r = 1; r * r <= n; ++r) {
    if (n % r) continue;
    const int c = n / r;
    bool ok = true;
    for (int a = 0; a < n && ok; ++a)
      for (int b = 0; b < n && ok; ++b)
        ok = inst.d(a, b) ==
             std::abs(a / c - b / c) + std::abs(a % c - b % c);
    if (!ok) continue;
    auto apply = [&](auto f) {
      std::vector<int> g(n);
      for (int l = 0; l < n; ++l) g[l] = f(l / c, l % c);
      return g;
    };
    std::vector<std::vector<int>> gens;
    gens.push_back(apply([&](int row, int col) { return row * c + (c - 1 - col); }));
    gens.push_back(apply([&](int row, int col) { return (r - 1 - row) * c + col; }));
    if (r == c)
      gens.push_back(apply([&](int row, int col) { return col * c + row; }));
    // close the generated group
    std::vector<int> ident(n);
    std::iota(ident.begin(), ident.end(), 0);
    std::vector<std::vector<int>> maps{ident};
    for (size_t h = 0; h < maps.size(); ++h)
      for (const auto& g : gens) {
        std::vector<int> comp(n);
        for (int l = 0; l < n; ++l) comp[l] = g[maps[h][l]];
        if (std::find(maps.begin(), maps.end(), comp) == maps.end())
          maps.push_back(comp);
      }
    for (const auto& g : maps)  // distance invariance sanity check
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          if (inst.d(g[a], g[b]) != inst.d(a, b))
            throw std::logic_error("grid automorphism breaks distances");
    sym.rows = r;
    sym.cols = c;
    sym.maps = std::move(maps);
    return sym;
  }
  return sym;
}

namespace {

std::vector<const std::vector<int>*> stabilizer(
    const GridSymmetry& sym, const std::vector<std::pair<int, int>>& fixed) {
  std::vector<const std::vector<int>*> stab;
  for (const auto& g : sym.maps) {
    bool ok = true;
    for (const auto& [f, l] : fixed)
      if (g[l] != l) {
        ok = false;
        break;
      }
    if (ok) stab.push_back(&g);
  }
  return stab;
}

bool orbit_min(const std::vector<const std::vector<int>*>& stab, int loc) {
  for (const auto* g : stab)
    if ((*g)[loc] < loc) return false;
  return true;
}

}  // namespace

std::vector<std::vector<std::pair<int, int>>> seed_assignments(
    int n, const std::vector<int>& order, int depth, const GridSymmetry& sym) {
  std::vector<std::vector<std::pair<int, int>>> cur{{}};
  for (int t = 0; t < depth; ++t) {
    const int fac = order[t];
    std::vector<std::vector<std::pair<int, int>>> next;
    for (const auto& partial : cur) {
      std::vector<char> used(n, 0);
      for (const auto& [f, l] : partial) used[l] = 1;
      auto stab = sym.found()
                      ? stabilizer(sym, partial)
                      : std::vector<const std::vector<int>*>{};
      for (int loc = 0; loc < n; ++loc) {
        if (used[loc]) continue;
        if (!stab.empty() && !orbit_min(stab, loc)) continue;
        auto child = partial;
        child.emplace_back(fac, loc);
        next.push_back(std::move(child));
      }
    }
    cur = std::move(next);
  }
  return cur;
}

void rebalance(std::vector<std::deque<BnbNode>>& queues) {
  if (queues.empty()) return;
  std::vector<BnbNode> pool;
  for (auto& q : queues) {
    for (auto& nd : q) pool.push_back(std::move(nd));
    q.clear();
  }
  std::stable_sort(pool.begin(), pool.end(), [](const BnbNode& a, const BnbNode& b) {
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.id < b.id;
  });
  for (size_t k = 0; k < pool.size(); ++k)
    queues[k % queues.size()].push_back(std::move(pool[k]));
}

namespace {

// Node-restricted store built cold: equivalent to collapsing the pristine
// (D' = 0) root store along every fixed pair, so only b and the offset
// absorb the fixed assignment.
CoefficientStore cold_store(const QapInstance& inst,
                            const std::vector<std::pair<int, int>>& fixed,
                            const std::vector<int>& ffac,
                            const std::vector<int>& floc) {
  const int m = (int)ffac.size();
  QapInstance sub;
  sub.n = m;
  sub.name = inst.name + "-node";
  sub.flow.resize((size_t)m * m);
  sub.dist.resize((size_t)m * m);
  sub.linear.resize((size_t)m * m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      sub.flow[(size_t)a * m + b] = inst.f(ffac[a], ffac[b]);
      sub.dist[(size_t)a * m + b] = inst.d(floc[a], floc[b]);
    }
  for (int a = 0; a < m; ++a)
    for (int p = 0; p < m; ++p) {
      double v = inst.b(ffac[a], floc[p]);
      for (const auto& [g, l] : fixed)
        v += inst.f(ffac[a], g) * inst.d(floc[p], l) +
             inst.f(g, ffac[a]) * inst.d(l, floc[p]);
      sub.linear[(size_t)a * m + p] = v;
    }
  CoefficientStore st = init_coefficients(sub);
  double off = 0;
  for (const auto& [g, l] : fixed) off += inst.b(g, l);
  for (const auto& [g, l] : fixed)
    for (const auto& [g2, l2] : fixed) off += inst.f(g, g2) * inst.d(l, l2);
  st.offset = off;
  return st;
}

double partial_cost(const QapInstance& inst,
                    const std::vector<std::pair<int, int>>& fixed) {
  double off = 0;
  for (const auto& [g, l] : fixed) off += inst.b(g, l);
  for (const auto& [g, l] : fixed)
    for (const auto& [g2, l2] : fixed) off += inst.f(g, g2) * inst.d(l, l2);
  return off;
}

struct Shared {
  const QapInstance& inst;
  const BnbConfig& cfg;
  std::vector<int> order;
  GridSymmetry sym;

  std::mutex mu;
  std::condition_variable cv;
  std::vector<BnbNode> heap;  // min-heap by (bound, id)
  int waiting = 0;
  bool done = false;
  std::atomic<double> incumbent;
  std::mutex inc_mu;
  std::vector<int> inc_perm;
  std::atomic<std::uint64_t> next_id{0};
  std::atomic<long> explored{0}, fathomed{0};
  std::atomic<int> needs_work{0};
  double root_bound = kInf;

  std::ofstream log;
  std::mutex log_mu;

  explicit Shared(const QapInstance& i, const BnbConfig& c)
      : inst(i), cfg(c), incumbent(c.incumbent) {}

  void offer_incumbent(double v, const std::vector<int>& perm) {
    std::lock_guard<std::mutex> lk(inc_mu);
    if (v < incumbent.load()) {
      incumbent.store(v);
      inc_perm = perm;
    }
  }

  static bool heap_after(const BnbNode& a, const BnbNode& b) {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
  void push_locked(BnbNode nd) {
    heap.push_back(std::move(nd));
    std::push_heap(heap.begin(), heap.end(), heap_after);
  }
  BnbNode pop_locked() {
    std::pop_heap(heap.begin(), heap.end(), heap_after);
    BnbNode nd = std::move(heap.back());
    heap.pop_back();
    return nd;
  }
  bool fathom(double bound) {
    const double inc = incumbent.load();
    if (!std::isfinite(inc)) return false;
    if (inc == std::floor(inc)) return std::ceil(bound - 1e-7) >= inc;
    return bound >= inc - 1e-9;
  }
  void log_event(const BnbNode& nd, const char* reason) {
    if (!log.is_open()) return;
    std::lock_guard<std::mutex> lk(log_mu);
    nlohmann::json j{{"id", nd.id},
                     {"level", nd.level},
                     {"bound", std::isfinite(nd.bound) ? nd.bound : -1.0},
                     {"reason", reason}};
    log << j.dump() << "\n";
  }
};

class Bank {
 public:
  Bank(Shared& sh, int bid) : sh_(sh), bid_(bid) {}

  double busy_seconds = 0;

  void free_sets(const BnbNode& nd, std::vector<int>* ffac,
                 std::vector<int>* floc) const {
    const int n = sh_.inst.n;
    std::vector<char> uf(n, 0), ul(n, 0);
    for (const auto& [f, l] : nd.fixed) {
      uf[f] = 1;
      ul[l] = 1;
    }
    for (int i = 0; i < n; ++i) {
      if (!uf[i]) ffac->push_back(i);
      if (!ul[i]) floc->push_back(i);
    }
  }

  void enumerate(const BnbNode& nd, const std::vector<int>& ffac,
                 std::vector<int> floc) {
    const int n = sh_.inst.n;
    std::sort(floc.begin(), floc.end());
    std::vector<int> perm(n, -1);
    for (const auto& [f, l] : nd.fixed) perm[f] = l;
    do {
      for (size_t a = 0; a < ffac.size(); ++a) perm[ffac[a]] = floc[a];
      const double v = evaluate_objective(sh_.inst, perm);
      if (v < sh_.incumbent.load()) sh_.offer_incumbent(v, perm);
    } while (std::next_permutation(floc.begin(), floc.end()));
  }

  // Bound a node in place: builds its restricted store (warm or cold), runs
  // the configured ascent pass(es), takes a warm-start snapshot when its
  // children may use one, and handles certificates.  Returns "fathom",
  // "feasible" or "branch".
  const char* bound_node(BnbNode& nd, const std::vector<int>& ffac,
                         const std::vector<int>& floc) {
    const BnbConfig& cfg = sh_.cfg;
    CoefficientStore store;
    if (nd.warm_ref) {
      // locate the newest fixed pair inside the parent's free sets; the
      // collapse folds its linear terms into b and its cost into offset
      const auto [f, l] = nd.fixed.back();
      std::vector<int> pfac = ffac, ploc = floc;
      pfac.insert(std::lower_bound(pfac.begin(), pfac.end(), f), f);
      ploc.insert(std::lower_bound(ploc.begin(), ploc.end(), l), l);
      const int lf = (int)(std::lower_bound(pfac.begin(), pfac.end(), f) - pfac.begin());
      const int ll = (int)(std::lower_bound(ploc.begin(), ploc.end(), l) - ploc.begin());
      store = collapse_store(*nd.warm_ref, lf, ll);
    } else {
      store = cold_store(sh_.inst, nd.fixed, ffac, floc);
    }

    const double inc_now = sh_.incumbent.load();
    AscentConfig acfg;
    acfg.variant = cfg.variant;
    acfg.sa_enabled = cfg.sa_enabled;
    acfg.iter_limit = cfg.node_iter_limit;
    acfg.workers = cfg.workers_per_bank;
    acfg.seed = cfg.seed + nd.id;
    acfg.early_stop_window = cfg.early_stop_window;
    acfg.early_stop_delta = cfg.early_stop_delta;
    acfg.upper_bound = std::isfinite(inc_now) ? inc_now : acfg.upper_bound;
    acfg.record_history = false;
    if (std::isfinite(inc_now))
      acfg.fathom_threshold =
          (inc_now == std::floor(inc_now)) ? inc_now - 1 + 2e-7 : inc_now;

    const bool want_snapshot =
        nd.level - nd.seed_level < cfg.max_depth &&
        (int)ffac.size() > cfg.enumerate_threshold + 1;
    const bool fast = (cfg.variant == Variant::F1 || cfg.variant == Variant::F2);
    const bool second_pass = fast && want_snapshot && cfg.snapshot_pass;

    CoefficientStore spare;
    if (second_pass) spare = store;  // the S1 snapshot pass reuses the node store
    AscentEngine eng(std::move(store), acfg);
    BoundReport rep = eng.run();
    nd.bound = std::max(nd.bound, rep.best_bound);

    if (!rep.certificate.empty()) {
      std::vector<int> perm(sh_.inst.n, -1);
      for (const auto& [f, l] : nd.fixed) perm[f] = l;
      for (size_t a = 0; a < ffac.size(); ++a)
        perm[ffac[a]] = floc[rep.certificate[a]];
      sh_.offer_incumbent(evaluate_objective(sh_.inst, perm), perm);
      return "feasible";
    }
    if (sh_.fathom(nd.bound)) return "fathom";

    if (want_snapshot) {
      if (!fast) {
        nd.own_store = std::make_shared<CoefficientStore>(eng.snapshot());
      } else if (second_pass) {
        AscentConfig scfg = acfg;
        scfg.variant = Variant::S1;
        scfg.sa_enabled = false;
        AscentEngine s1(std::move(spare), scfg);
        BoundReport srep = s1.run();
        nd.bound = std::max(nd.bound, srep.best_bound);
        if (sh_.fathom(nd.bound)) return "fathom";
        nd.own_store = std::make_shared<CoefficientStore>(s1.snapshot());
      }
    }
    return "branch";
  }

  // Process one node: fathom, enumerate, or bound (and optionally branch
  // into `out`, depth-first order).
  void process(BnbNode nd, std::deque<BnbNode>* out, bool allow_branch) {
    const auto t0 = Clock::now();
    const int n = sh_.inst.n;
    const char* reason = nullptr;
    if (sh_.fathom(nd.bound)) reason = "fathom";
    std::vector<int> ffac, floc;
    if (!reason) {
      free_sets(nd, &ffac, &floc);
      if (!reason && sh_.fathom(partial_cost(sh_.inst, nd.fixed)))
        reason = "fathom";
      if (!reason && (int)ffac.size() <= std::max(sh_.cfg.enumerate_threshold, 2)) {
        enumerate(nd, ffac, floc);
        reason = "enumerated";
      }
      if (!reason && !nd.bounded) {
        reason = bound_node(nd, ffac, floc);
        nd.bounded = true;
        if (nd.level == 0 || nd.level == sh_.cfg.l_init) {
          std::lock_guard<std::mutex> lk(sh_.mu);
          sh_.root_bound = std::min(sh_.root_bound, nd.bound);
        }
      } else if (!reason) {
        reason = "branch";
      }
    }
    if (std::string(reason) == "branch" && !allow_branch) {
      // seed bounding pass: return the bounded node to the master list
      std::lock_guard<std::mutex> lk(sh_.mu);
      sh_.push_locked(std::move(nd));
      sh_.cv.notify_all();
      busy_seconds += std::chrono::duration<double>(Clock::now() - t0).count();
      return;
    }
    if (std::string(reason) == "branch") {
      const int fac = sh_.order[nd.level];
      auto stab = (sh_.cfg.symmetry_elimination && sh_.sym.found())
                      ? stabilizer(sh_.sym, nd.fixed)
                      : std::vector<const std::vector<int>*>{};
      std::vector<char> used(n, 0);
      for (const auto& [f, l] : nd.fixed) used[l] = 1;
      std::vector<BnbNode> kids;
      for (int loc = 0; loc < n; ++loc) {
        if (used[loc]) continue;
        if (!stab.empty() && !orbit_min(stab, loc)) continue;
        BnbNode ch;
        ch.level = nd.level + 1;
        ch.fixed = nd.fixed;
        ch.fixed.emplace_back(fac, loc);
        ch.bound = nd.bound;
        ch.id = sh_.next_id.fetch_add(1);
        ch.seed_level = nd.seed_level;
        if (nd.own_store && ch.level - ch.seed_level <= sh_.cfg.max_depth)
          ch.warm_ref = nd.own_store;
        kids.push_back(std::move(ch));
      }
      for (auto it = kids.rbegin(); it != kids.rend(); ++it)
        out->push_back(std::move(*it));  // LIFO pop -> lowest location first
    } else if (std::string(reason) == "fathom") {
      sh_.fathomed.fetch_add(1);
    }
    sh_.explored.fetch_add(1);
    sh_.log_event(nd, reason);
    busy_seconds += std::chrono::duration<double>(Clock::now() - t0).count();
  }

  void run() {
    std::deque<BnbNode> local;
    auto last_donate = Clock::now();
    for (;;) {
      if (local.empty()) {
        std::unique_lock<std::mutex> lk(sh_.mu);
        sh_.needs_work.fetch_add(1);
        while (sh_.heap.empty() && !sh_.done) {
          ++sh_.waiting;
          if (sh_.waiting == sh_.cfg.banks) {
            sh_.done = true;
            sh_.cv.notify_all();
            --sh_.waiting;
            break;
          }
          sh_.cv.wait(lk);
          --sh_.waiting;
        }
        sh_.needs_work.fetch_sub(1);
        if (sh_.done && sh_.heap.empty()) return;
        if (!sh_.heap.empty()) local.push_back(sh_.pop_locked());
        continue;
      }
      BnbNode nd = std::move(local.back());
      local.pop_back();
      process(std::move(nd), &local, true);
      // Load rebalancing: starved banks (empty local queues) trigger a
      // donation immediately; the configured period forces one regardless.
      const bool period =
          std::chrono::duration<double>(Clock::now() - last_donate).count() >=
          sh_.cfg.rebalance_period;
      if (local.size() > 1 && (sh_.needs_work.load() > 0 || period)) {
        std::lock_guard<std::mutex> lk(sh_.mu);
        while (local.size() > 1) {
          sh_.push_locked(std::move(local.front()));
          local.pop_front();
        }
        last_donate = Clock::now();
        sh_.cv.notify_all();
      }
    }
  }

  // Bound every seed before depth-first execution starts, so the master
  // list is ordered by real bounds (BstFS seeding).
  void bound_seeds(std::vector<BnbNode>* seeds, std::atomic<size_t>* next) {
    for (;;) {
      const size_t k = next->fetch_add(1);
      if (k >= seeds->size()) return;
      process(std::move((*seeds)[k]), nullptr, false);
    }
  }

 private:
  Shared& sh_;
  int bid_;
};

}  // namespace

BnbResult branch_and_bound(const QapInstance& inst, const BnbConfig& cfg) {
  const auto t0 = Clock::now();
  Shared sh(inst, cfg);
  sh.order = branching_order(inst, cfg.branch_rule);
  if (cfg.symmetry_elimination) sh.sym = detect_grid_symmetry(inst);
  if (!cfg.incumbent_perm.empty())
    sh.inc_perm = cfg.incumbent_perm;
  if (!cfg.log_path.empty()) sh.log.open(cfg.log_path);

  const GridSymmetry nosym;
  auto seeds = seed_assignments(
      inst.n, sh.order, std::min(cfg.l_init, inst.n),
      cfg.symmetry_elimination ? sh.sym : nosym);
  const long seed_count = (long)seeds.size();
  std::vector<BnbNode> seed_nodes;
  seed_nodes.reserve(seeds.size());
  for (auto& fx : seeds) {
    BnbNode nd;
    nd.level = (int)fx.size();
    nd.seed_level = nd.level;
    nd.fixed = std::move(fx);
    nd.id = sh.next_id.fetch_add(1);
    seed_nodes.push_back(std::move(nd));
  }

  std::vector<Bank> banks;
  banks.reserve(cfg.banks);
  for (int b = 0; b < cfg.banks; ++b) banks.emplace_back(sh, b);
  std::atomic<size_t> seed_next{0};
  auto full_run = [&](Bank& b) {
    b.bound_seeds(&seed_nodes, &seed_next);
    b.run();
  };
  if (cfg.banks == 1) {
    full_run(banks[0]);
  } else {
    std::vector<std::thread> threads;
    for (int b = 0; b < cfg.banks; ++b)
      threads.emplace_back([&banks, &full_run, b] { full_run(banks[b]); });
    for (auto& t : threads) t.join();
  }

  BnbResult res;
  res.value = sh.incumbent.load();
  res.permutation = sh.inc_perm;
  res.certified =
      !res.permutation.empty() &&
      evaluate_objective(inst, res.permutation) == res.value;
  res.root_bound = std::isfinite(sh.root_bound) ? sh.root_bound : -kInf;
  res.nodes_explored = sh.explored.load();
  res.nodes_seeded = seed_count;
  res.nodes_fathomed = sh.fathomed.load();
  res.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  for (auto& b : banks)
    res.bank_utilization.push_back(
        res.wall_seconds > 0 ? b.busy_seconds / res.wall_seconds : 0.0);
  return res;
}

std::string BnbResult::to_json() const {
  nlohmann::json j;
  j["value"] = value;
  j["permutation"] = permutation;
  j["certified"] = certified;
  j["root_bound"] = root_bound;
  j["nodes_explored"] = nodes_explored;
  j["nodes_seeded"] = nodes_seeded;
  j["nodes_fathomed"] = nodes_fathomed;
  j["wall_seconds"] = wall_seconds;
  j["bank_utilization"] = bank_utilization;
  return j.dump(2);
}

}  // namespace qap
