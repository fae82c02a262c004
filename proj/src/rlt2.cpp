#include "qap/rlt2.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "qap/lap.hpp"

namespace qap {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
using Clock = std::chrono::steady_clock;
double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}
}  // namespace

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::F1: return "F1";
    case Variant::F2: return "F2";
    case Variant::S1: return "S1";
    case Variant::S2: return "S2";
  }
  return "?";
}

Variant parse_variant(const std::string& s) {
  std::string t;
  for (char c : s) t += (char)std::toupper((unsigned char)c);
  if (t == "F1") return Variant::F1;
  if (t == "F2") return Variant::F2;
  if (t == "S1") return Variant::S1;
  if (t == "S2") return Variant::S2;
  throw std::invalid_argument("unknown variant: " + s);
}

StoreIndex::StoreIndex(int m_) : m(m_) {
  fpairs = m * (m - 1) / 2;
  lpairs = m * (m - 1);
  tiles = fpairs * lpairs;
  esz = (m - 2) * (m - 2);
  fp_i.resize(fpairs);
  fp_j.resize(fpairs);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      fp_i[fpair(i, j)] = i;
      fp_j[fpair(i, j)] = j;
    }
  lp_p.resize(lpairs);
  lp_q.resize(lpairs);
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q)
      if (p != q) {
        lp_p[lpair(p, q)] = p;
        lp_q[lpair(p, q)] = q;
      }
}

CoefficientStore init_coefficients(const QapInstance& inst) {
  if (inst.n < 3)
    throw std::invalid_argument("init_coefficients: n >= 3 required by RLT2");
  const int m = inst.n;
  CoefficientStore st;
  st.m = m;
  st.idx = StoreIndex(m);
  st.b.resize((size_t)m * m);
  for (int i = 0; i < m; ++i)
    for (int p = 0; p < m; ++p)
      st.b[(size_t)i * m + p] = inst.b(i, p) + inst.f(i, i) * inst.d(p, p);
  st.c.assign((size_t)m * m * (m - 1) * (m - 1), 0.0);
  for (int i = 0; i < m; ++i)
    for (int p = 0; p < m; ++p)
      for (int j = 0; j < m; ++j) {
        if (j == i) continue;
        for (int q = 0; q < m; ++q) {
          if (q == p) continue;
          st.c[st.idx.cidx(i, p, j, q)] = inst.f(i, j) * inst.d(p, q);
        }
      }
  st.d.assign((size_t)st.idx.tiles * st.idx.esz, 0.0);
  return st;
}

double store_evaluate(const CoefficientStore& st, const std::vector<int>& perm) {
  const int m = st.m;
  double v = st.offset;
  for (int i = 0; i < m; ++i) v += st.b[(size_t)i * m + perm[i]];
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (j != i) v += st.c[st.idx.cidx(i, perm[i], j, perm[j])];
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      const int t = st.idx.tile(i, j, perm[i], perm[j]);
      const double* tl = st.tile(t);
      for (int k = 0; k < m; ++k)
        if (k != i && k != j)
          v += tl[st.idx.cell(i, j, perm[i], perm[j], k, perm[k])];
    }
  return v;
}

CoefficientStore collapse_store(const CoefficientStore& st, int fac, int loc) {
  const int m = st.m, mc = m - 1;
  if (mc < 2) throw std::invalid_argument("collapse_store: store too small");
  const StoreIndex& ix = st.idx;
  CoefficientStore out;
  out.m = mc;
  out.idx = StoreIndex(mc);
  out.offset = st.offset + st.b[(size_t)fac * m + loc];
  auto fm = [&](int i) { return i - (i > fac); };  // old fac -> new
  auto lm = [&](int p) { return p - (p > loc); };
  out.b.resize((size_t)mc * mc);
  for (int i = 0; i < m; ++i) {
    if (i == fac) continue;
    for (int p = 0; p < m; ++p) {
      if (p == loc) continue;
      out.b[(size_t)fm(i) * mc + lm(p)] =
          st.b[(size_t)i * m + p] + st.c[ix.cidx(i, p, fac, loc)] +
          st.c[ix.cidx(fac, loc, i, p)];
    }
  }
  out.c.assign((size_t)mc * mc * (mc - 1) * (mc - 1), 0.0);
  for (int i = 0; i < m; ++i) {
    if (i == fac) continue;
    for (int p = 0; p < m; ++p) {
      if (p == loc) continue;
      for (int j = 0; j < m; ++j) {
        if (j == i || j == fac) continue;
        for (int q = 0; q < m; ++q) {
          if (q == p || q == loc) continue;
          out.c[out.idx.cidx(fm(i), lm(p), fm(j), lm(q))] =
              st.c[ix.cidx(i, p, j, q)];
        }
      }
    }
  }
  if (mc >= 3) out.d.assign((size_t)out.idx.tiles * out.idx.esz, 0.0);
  // Fold the d tiles: cells containing (fac, loc) become pairwise terms,
  // cells whose facility or location is fixed elsewhere vanish, the rest
  // copy through with reindexing.
  for (int t = 0; t < ix.tiles; ++t) {
    const int i = ix.fp_i[t / ix.lpairs], j = ix.fp_j[t / ix.lpairs];
    const int p = ix.lp_p[t % ix.lpairs], q = ix.lp_q[t % ix.lpairs];
    const double* tl = st.tile(t);
    if (i == fac || j == fac) {
      const bool first = (i == fac);
      if ((first ? p : q) != loc) continue;  // fixed facility elsewhere: zero
      const int oi = first ? j : i, op = first ? q : p;  // surviving pair
      for (int c = 0; c < ix.esz; ++c) {
        if (tl[c] == 0) continue;
        int k, r;
        ix.uncell(i, j, p, q, c, &k, &r);
        if (r == loc) continue;
        out.c[out.idx.cidx(fm(oi), lm(op), fm(k), lm(r))] += tl[c];
      }
      continue;
    }
    if (p == loc || q == loc) continue;  // location taken by the fixed facility
    for (int c = 0; c < ix.esz; ++c) {
      const double v = tl[c];
      int k, r;
      ix.uncell(i, j, p, q, c, &k, &r);
      if (k == fac) {
        if (r == loc)
          out.c[out.idx.cidx(fm(i), lm(p), fm(j), lm(q))] += v;
        continue;
      }
      if (r == loc) continue;
      if (v == 0) continue;
      out.d[(size_t)out.idx.tile(fm(i), fm(j), lm(p), lm(q)) * out.idx.esz +
            out.idx.cell(fm(i), fm(j), lm(p), lm(q), fm(k), lm(r))] += v;
    }
  }
  return out;
}

bool redistribute_family(const double pi[3], double add[3], int virtual_slots,
                         double tol) {
  int nb = virtual_slots;
  double total = 0;
  for (int s = 0; s < 3; ++s) {
    if (pi[s] > tol)
      total += pi[s];
    else
      ++nb;
  }
  if (total <= 0) {
    add[0] = add[1] = add[2] = 0;
    return true;
  }
  if (nb == 0) {
    add[0] = add[1] = add[2] = 0;
    return false;
  }
  const double share = total / nb;
  for (int s = 0; s < 3; ++s) add[s] = (pi[s] > tol) ? -pi[s] : share;
  return true;
}

AscentEngine::AscentEngine(CoefficientStore store, const AscentConfig& cfg)
    : st_(std::move(store)), cfg_(cfg), m_(st_.m), rng_(cfg.seed) {
  if (m_ < 3) throw std::invalid_argument("AscentEngine: m >= 3 required");
  const StoreIndex& ix = st_.idx;
  theta_.assign(ix.tiles, 0.0);
  delta_.assign((size_t)m_ * m_, 0.0);
  piz_.assign(st_.d.size(), 0.0);
  piy_.assign(st_.c.size(), 0.0);
  pix_.assign((size_t)m_ * m_, 0.0);
  ybar_.assign(ix.tiles, 0.0);
  dx_.assign((size_t)m_ * m_, 0.0);
  push_.assign(ix.tiles, 0.0);
  if (is_fast()) incz_.assign(st_.d.size(), 0.0);
  ycost_.assign(st_.c.size(), 0.0);
  xcost_.assign((size_t)m_ * m_, 0.0);
  zu_.assign((size_t)ix.tiles * (m_ - 2), 0.0);
  zv_.assign((size_t)ix.tiles * (m_ - 2), 0.0);
  zrow_.assign((size_t)ix.tiles * (m_ - 2), -1);
  zcol_.assign((size_t)ix.tiles * (m_ - 2), -1);
  xrow_.assign(m_, -1);
  xcol_.assign(m_, -1);
  sa_fac_.assign(m_, 0.0);
  sa_loc_.assign(m_, 0.0);
}

// Fold the previous iteration's slacks into the coefficient arrays:
// varphi mirror split and Type-2 drain at the C level, Type-3 (and pending
// Type-4) drains at the b level, and the Type-1 family redistribution with
// phi shares at the D level.  Every transfer is an exact identity on
// feasible points, so store_evaluate is invariant.
void AscentEngine::ascent_update() {
  const StoreIndex& ix = st_.idx;
  const int m = m_;
  const double kz = cfg_.kappa_z_upper, ky = cfg_.kappa_y, kx = cfg_.kappa_x;
  const double phi = cfg_.phi_split, vph = cfg_.varphi;

  // x-level mass in transit: Type-3 drain plus accepted SA amounts
  for (int i = 0; i < m; ++i)
    for (int p = 0; p < m; ++p) {
      const size_t ip = (size_t)i * m + p;
      dx_[ip] = kx * pix_[ip] + sa_fac_[i] + sa_loc_[p];
      st_.b[ip] -= kx * pix_[ip];  // the SA share was drained at perturb time
    }

  // y level: equalize mirror slacks, drain the upper coefficient, park the
  // lower ordering's x share, and precompute each tile's push-down amount
  for (int t = 0; t < ix.tiles; ++t) {
    const int i = ix.fp_i[t / ix.lpairs], j = ix.fp_j[t / ix.lpairs];
    const int p = ix.lp_p[t % ix.lpairs], q = ix.lp_q[t % ix.lpairs];
    const double up = piy_[ix.cidx(i, p, j, q)];
    const double lo = piy_[ix.cidx(j, q, i, p)];
    ybar_[t] = 0.5 * (up + lo);
    st_.c[ix.cidx(i, p, j, q)] += vph * (lo - up) - ky * ybar_[t];
    st_.c[ix.cidx(j, q, i, p)] += vph * (up - lo) + dx_[(size_t)j * m + q] / (m - 1);
    push_[t] = (ky * ybar_[t] + dx_[(size_t)i * m + p] / (m - 1)) / (m - 2);
  }

  // z level: each stored cell donates its retained slack plus the mass
  // pushed down through it, split phi/phi between its two stored family
  // partners; lower-order members hold no storage and receive nothing
  const bool fast = is_fast();
  const int md = m - 2;
#pragma omp parallel for schedule(static) num_threads(cfg_.workers)
  for (int t = 0; t < ix.tiles; ++t) {
    const int i = ix.fp_i[t / ix.lpairs], j = ix.fp_j[t / ix.lpairs];
    const int p = ix.lp_p[t % ix.lpairs], q = ix.lp_q[t % ix.lpairs];
    double* dt = st_.tile(t);
    double* it = fast ? incz_.data() + (size_t)t * ix.esz : nullptr;
    const double* zt = piz_.data() + (size_t)t * ix.esz;
    for (int c = 0; c < ix.esz; ++c) {
      int k, r;
      ix.uncell(i, j, p, q, c, &k, &r);
      int bf1, bf2, bl1, bl2;
      if (k > i) { bf1 = i; bf2 = k; bl1 = p; bl2 = r; }
      else       { bf1 = k; bf2 = i; bl1 = r; bl2 = p; }
      const int tB = ix.tile(bf1, bf2, bl1, bl2);
      const int cB = ix.cell(bf1, bf2, bl1, bl2, j, q);
      int cf1, cf2, cl1, cl2;
      if (k > j) { cf1 = j; cf2 = k; cl1 = q; cl2 = r; }
      else       { cf1 = k; cf2 = j; cl1 = r; cl2 = q; }
      const int tC = ix.tile(cf1, cf2, cl1, cl2);
      const int cC = ix.cell(cf1, cf2, cl1, cl2, i, p);
      const double sigB = kz * piz_[(size_t)tB * ix.esz + cB] + push_[tB];
      const double sigC = kz * piz_[(size_t)tC * ix.esz + cC] + push_[tC];
      const double gain = phi * sigB + phi * sigC;
      dt[c] += gain - kz * zt[c];
      if (fast) it[c] = (1.0 - kz) * zt[c] + gain;
    }
  }
  (void)md;
  std::fill(sa_fac_.begin(), sa_fac_.end(), 0.0);
  std::fill(sa_loc_.begin(), sa_loc_.end(), 0.0);
}

void AscentEngine::stage_z() {
  const auto t0 = Clock::now();
  const StoreIndex& ix = st_.idx;
  const int md = m_ - 2;
  std::vector<double>& costs =
      (is_fast() && iter_ > 0) ? incz_ : st_.d;

  auto solve_all = [&]() {
#pragma omp parallel num_threads(cfg_.workers)
    {
      LapSolver solver(md);
#pragma omp for schedule(static)
      for (int t = 0; t < ix.tiles; ++t) {
        const size_t off = (size_t)t * md;
        theta_[t] = solver.solve(costs.data() + (size_t)t * ix.esz, md,
                                 zrow_.data() + off, zcol_.data() + off,
                                 zu_.data() + off, zv_.data() + off);
        const double* tc = costs.data() + (size_t)t * ix.esz;
        double* tz = piz_.data() + (size_t)t * ix.esz;
        for (int a = 0; a < md; ++a)
          for (int b = 0; b < md; ++b)
            tz[a * md + b] = tc[a * md + b] - zu_[off + a] - zv_[off + b];
      }
    }
  };
  solve_all();

  if (is_two_phase()) {
    std::vector<double> phase1_theta = theta_;
    stage_z_second_phase(costs, phase1_theta);
    solve_all();
    for (int t = 0; t < ix.tiles; ++t)
      if (theta_[t] < phase1_theta[t] - 1e-7)
        throw std::logic_error("phase-2 theta regressed on tile " +
                               std::to_string(t));
  }
  rec_.z_ms = ms_since(t0);
}

// Second Z phase: within each six-variable symmetric family, drain every
// slack-positive member and spread the total evenly over the binding slots
// (three lower-order slots are always binding and their shares vanish with
// the omitted storage).
void AscentEngine::stage_z_second_phase(std::vector<double>& costs,
                                        const std::vector<double>&) {
  const StoreIndex& ix = st_.idx;
#pragma omp parallel for schedule(static) num_threads(cfg_.workers)
  for (int t = 0; t < ix.tiles; ++t) {
    const int i = ix.fp_i[t / ix.lpairs], j = ix.fp_j[t / ix.lpairs];
    const int p = ix.lp_p[t % ix.lpairs], q = ix.lp_q[t % ix.lpairs];
    for (int c = 0; c < ix.esz; ++c) {
      int k, r;
      ix.uncell(i, j, p, q, c, &k, &r);
      if (k < j) continue;  // canonical family representative has i < j < k
      const int tB = ix.tile(i, k, p, r), cB = ix.cell(i, k, p, r, j, q);
      const int tC = ix.tile(j, k, q, r), cC = ix.cell(j, k, q, r, i, p);
      const size_t iA = (size_t)t * ix.esz + c;
      const size_t iB = (size_t)tB * ix.esz + cB;
      const size_t iC = (size_t)tC * ix.esz + cC;
      const double pi[3] = {piz_[iA], piz_[iB], piz_[iC]};
      double add[3];
      redistribute_family(pi, add);
      // The three lower-order family slots are pair-swapped mirrors of the
      // stored slots and always binding; the half storage carries each
      // mirror's mass inside its stored twin, so their shares fold back
      // here (otherwise the redistribution would leak mass out of the
      // store and weaken later iterations).
      double total = 0;
      int nb = 3;
      for (double s : pi)
        if (s > 1e-9)
          total += s;
        else
          ++nb;
      const double share = total / nb;
      costs[iA] += add[0] + share;
      costs[iB] += add[1] + share;
      costs[iC] += add[2] + share;
    }
  }
}

void AscentEngine::stage_y() {
  const auto t0 = Clock::now();
  const StoreIndex& ix = st_.idx;
  const int m = m_, my = m - 1;
  const bool inc = is_fast() && iter_ > 0;
  // Build Y costs: full folded coefficients plus the tile optima for the
  // S variants, incremental costs (captured tile mass, carried lower
  // slacks) for the F variants.
#pragma omp parallel for schedule(static) num_threads(cfg_.workers)
  for (int ipf = 0; ipf < m * m; ++ipf) {
    const int i = ipf / m, p = ipf % m;
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      for (int q = 0; q < m; ++q) {
        if (q == p) continue;
        const size_t cix = ix.cidx(i, p, j, q);
        const int t = (i < j) ? ix.tile(i, j, p, q) : ix.tile(j, i, q, p);
        if (!inc)
          ycost_[cix] = st_.c[cix] + ((i < j) ? theta_[t] : 0.0);
        else if (i < j)
          ycost_[cix] = theta_[t];
        else
          ycost_[cix] = ybar_[t] + dx_[(size_t)i * m + p] / (m - 1);
      }
    }
  }
#pragma omp parallel num_threads(cfg_.workers)
  {
    LapSolver solver(my);
    std::vector<int> r2c(my), c2r(my);
    std::vector<double> u(my), v(my);
#pragma omp for schedule(static)
    for (int ipf = 0; ipf < m * m; ++ipf) {
      const double* cost = ycost_.data() + (size_t)ipf * my * my;
      delta_[ipf] = solver.solve(cost, my, r2c.data(), c2r.data(), u.data(),
                                 v.data());
      double* py = piy_.data() + (size_t)ipf * my * my;
      for (int a = 0; a < my; ++a)
        for (int b = 0; b < my; ++b)
          py[a * my + b] = cost[a * my + b] - u[a] - v[b];
    }
  }
  rec_.y_ms = ms_since(t0);
}

void AscentEngine::stage_x() {
  const auto t0 = Clock::now();
  const int m = m_;
  const bool inc = is_fast() && iter_ > 0;
  for (size_t ip = 0; ip < (size_t)m * m; ++ip)
    xcost_[ip] = delta_[ip] + (inc ? 0.0 : st_.b[ip]);
  LapSolver solver(m);
  std::vector<double> u(m), v(m);
  const double nu =
      solver.solve(xcost_.data(), m, xrow_.data(), xcol_.data(), u.data(),
                   v.data());
  for (size_t ip = 0; ip < (size_t)m * m; ++ip)
    pix_[ip] = xcost_[ip] - u[ip / m] - v[ip % m];
  if (is_fast()) {
    running_ += nu;
    last_bound_ = running_ + st_.offset;
  } else {
    last_bound_ = nu + st_.offset;
  }
  if (last_bound_ > best_) best_ = last_bound_;
  rec_.x_ms = ms_since(t0);
}

// Complementary slackness along the X-LAP primal: optimal when every
// induced y and z variable has (near-)zero reduced cost.
bool AscentEngine::feasibility_check() {
  const double tol = 1e-7;
  const StoreIndex& ix = st_.idx;
  const int m = m_;
  const std::vector<int>& s = xrow_;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (j != i && piy_[ix.cidx(i, s[i], j, s[j])] > tol) return false;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      const int t = ix.tile(i, j, s[i], s[j]);
      const double* tz = piz_.data() + (size_t)t * ix.esz;
      for (int k = 0; k < m; ++k)
        if (k != i && k != j &&
            tz[ix.cell(i, j, s[i], s[j], k, s[k])] > tol)
          return false;
    }
  cert_ = s;
  cert_val_ = last_bound_;
  return true;
}

// Type-4 rule: random b-level drains accepted by a cooling Metropolis test;
// amounts are folded down to the D level at the next ascent_update.
void AscentEngine::sa_perturb() {
  const double nu = best_;
  if (nu <= 0) return;
  if (temp_ <= 0) {
    const double ub = std::isfinite(cfg_.upper_bound) ? cfg_.upper_bound
                                                      : 1.05 * nu + 1.0;
    temp_ = cfg_.sa_t0_fraction * ub;
  }
  const double cap = cfg_.sa_kappa_lb_cap * nu;
  const int m = m_;
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<double> amt(2 * m, 0.0);
  double total = 0;
  for (int s = 0; s < 2 * m; ++s) {
    const double kap = U(rng_) * cap;
    const bool accept = U(rng_) < std::exp(-kap / temp_);
    if (accept) {
      amt[s] = kap;
      total += kap;
    }
  }
  if (total > cap)
    for (double& a : amt) a *= cap / total;
  for (int i = 0; i < m; ++i) sa_fac_[i] = amt[i] / m;
  for (int p = 0; p < m; ++p) sa_loc_[p] = amt[m + p] / m;
  double drained = 0;
  for (int i = 0; i < m; ++i) {
    drained += sa_fac_[i] + sa_loc_[i];
    for (int p = 0; p < m; ++p)
      st_.b[(size_t)i * m + p] -= sa_fac_[i] + sa_loc_[p];
  }
  if (is_fast()) {
    running_ -= drained;
    // shift the implicit x potentials so stored slacks stay exact
  }
  if ((iter_ + 1) % cfg_.sa_cool_period == 0) temp_ *= cfg_.sa_cool_factor;
}

double AscentEngine::iterate() {
  rec_ = IterationRecord{};
  if (iter_ > 0) ascent_update();
  stage_z();
  stage_y();
  stage_x();
  if (cert_.empty()) {
    const bool feas = feasibility_check();
    if (!feas && cfg_.sa_enabled) sa_perturb();
  }
  ++iter_;
  rec_.iteration = iter_;
  rec_.bound = last_bound_;
  rec_.gap = gap();
  return last_bound_;
}

double AscentEngine::gap() const {
  if (!std::isfinite(cfg_.upper_bound) || cfg_.upper_bound == 0) return kInf;
  return (cfg_.upper_bound - best_) / cfg_.upper_bound;
}

CoefficientStore AscentEngine::snapshot() const {
  if (is_fast())
    throw std::logic_error(
        "warm-start snapshots are only offered from S variants");
  return st_;
}

BoundReport AscentEngine::run() {
  const auto t0 = Clock::now();
  BoundReport rep;
  rep.variant = variant_name(cfg_.variant);
  rep.sa_enabled = cfg_.sa_enabled;
  rep.upper_bound = cfg_.upper_bound;
  rep.termination = "iteration-limit";
  std::vector<double> best_hist;
  while (iter_ < cfg_.iter_limit) {
    iterate();
    if (cfg_.record_history) rep.records.push_back(rec_);
    best_hist.push_back(best_);
    if (!cert_.empty()) {
      rep.termination = "feasible-found";
      break;
    }
    if (cfg_.min_gap > 0 && gap() <= cfg_.min_gap) {
      rep.termination = "gap-closed";
      break;
    }
    if (best_ >= cfg_.fathom_threshold) {
      rep.termination = "early-stop";
      break;
    }
    if (cfg_.early_stop_window > 0 &&
        (int)best_hist.size() > cfg_.early_stop_window) {
      const double prev =
          best_hist[best_hist.size() - 1 - cfg_.early_stop_window];
      if (best_ - prev <
          cfg_.early_stop_delta * std::max(1.0, std::fabs(best_))) {
        rep.termination = "early-stop";
        break;
      }
    }
  }
  rep.best_bound = best_;
  rep.gap = gap();
  rep.iterations = iter_;
  if (!cert_.empty()) {
    rep.certificate = cert_;
    rep.certificate_value = cert_val_;
  }
  rep.wall_ms = ms_since(t0);
  return rep;
}

BoundReport run_ascent(const QapInstance& inst, const AscentConfig& cfg) {
  AscentEngine eng(init_coefficients(inst), cfg);
  BoundReport rep = eng.run();
  rep.instance = inst.name;
  if (!rep.certificate.empty())
    rep.certificate_value = evaluate_objective(inst, rep.certificate);
  return rep;
}

BoundReport run_ascent_warm(CoefficientStore warm, const AscentConfig& cfg) {
  AscentEngine eng(std::move(warm), cfg);
  return eng.run();
}

std::string BoundReport::to_json() const {
  nlohmann::json j;
  j["instance"] = instance;
  j["variant"] = variant;
  j["sa_enabled"] = sa_enabled;
  j["best_bound"] = best_bound;
  if (std::isfinite(upper_bound)) j["upper_bound"] = upper_bound;
  if (std::isfinite(gap)) j["gap"] = gap;
  j["termination"] = termination;
  j["iterations"] = iterations;
  j["wall_ms"] = wall_ms;
  if (!certificate.empty()) {
    j["certificate"] = certificate;
    j["certificate_value"] = certificate_value;
  }
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& r : records) {
    recs.push_back({{"m", r.iteration},
                    {"bound", r.bound},
                    {"gap", std::isfinite(r.gap) ? r.gap : -1.0},
                    {"z_ms", r.z_ms},
                    {"y_ms", r.y_ms},
                    {"x_ms", r.x_ms}});
  }
  j["records"] = recs;
  return j.dump(2);
}

std::string BoundReport::to_csv() const {
  std::ostringstream out;
  out << "iteration,bound,gap,z_ms,y_ms,x_ms\n";
  for (const auto& r : records)
    out << r.iteration << ',' << r.bound << ','
        << (std::isfinite(r.gap) ? r.gap : -1.0) << ',' << r.z_ms << ','
        << r.y_ms << ',' << r.x_ms << "\n";
  return out.str();
}

}  // namespace qap
