#pragma once

// Self-contained release gate: eleven numbered checks, each timed against a
// wall-clock budget that is part of its pass condition.  Every check builds
// its own inputs from fixed seeds, so a pass is reproducible bit for bit.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "contagion/distribution.hpp"
#include "contagion/dynamics.hpp"
#include "contagion/expander.hpp"
#include "contagion/experiments.hpp"
#include "contagion/graph.hpp"
#include "contagion/graphgen.hpp"
#include "contagion/oracle.hpp"
#include "contagion/rng.hpp"
#include "contagion/stats.hpp"

namespace contagion::acceptance {

constexpr int kCriterionCount = 11;

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  double budget_seconds = 0.0;
  std::string detail;
};

namespace detail {

inline std::string str(const char* fmt, ...) {
  va_list ap;
  va_start(ap, fmt);
  char buf[512];
  vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  return buf;
}

struct Checker {
  bool ok = true;
  std::string log;
  void note(const std::string& s) {
    if (!log.empty()) log += "; ";
    log += s;
  }
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      note("FAILED: " + what);
    }
  }
};

// Canonical bracket encodings of all rooted trees, by vertex count.
// Subtree picks are non-increasing in (size, index), so each multiset of
// child subtrees appears exactly once.
inline std::vector<std::vector<std::string>> rooted_trees(int nmax) {
  std::vector<std::vector<std::string>> T(nmax + 1);
  T[1] = {"()"};
  for (int n = 2; n <= nmax; ++n) {
    std::vector<std::string> out;
    std::function<void(int, int, int, const std::string&)> rec =
        [&](int remaining, int max_s, int max_i, const std::string& acc) {
          if (remaining == 0) {
            out.push_back("(" + acc + ")");
            return;
          }
          for (int s = std::min(remaining, max_s); s >= 1; --s) {
            int istart = int(T[s].size()) - 1;
            if (s == max_s) istart = std::min(istart, max_i);
            for (int i = istart; i >= 0; --i) rec(remaining - s, s, i, acc + T[s][i]);
          }
        };
    rec(n - 1, n - 1, 1 << 30, "");
    T[n] = out;
  }
  return T;
}

inline RootedTree tree_from_canon(const std::string& canon) {
  std::vector<std::pair<uint32_t, uint32_t>> edges;
  std::vector<uint32_t> stack;
  uint32_t next = 0;
  for (char c : canon) {
    if (c == '(') {
      if (!stack.empty()) edges.emplace_back(stack.back(), next);
      stack.push_back(next++);
    } else {
      stack.pop_back();
    }
  }
  RootedTree t;
  t.g = graph_from_edges(next, edges, 0);
  t.rho = 0;
  uint32_t L = 0;
  for (uint32_t d : t.g.depth) L = std::max(L, d);
  t.L = L;
  return t;
}

// Randomized finite chains for the balance and reweighting checks: a
// recursive tree over <= 17 vertices with depths capped at 4 (keeps the
// dilated chains well conditioned), an occasional doubled edge, a pinned
// anchor, and every fourth instance pinning a second vertex.
struct ChainInstance {
  HalfEdgeGraph g;
  Variant var;
  double lambda = 0.0;
  uint64_t states = 0;
};

inline ChainInstance chain_instance(uint64_t seed, int i) {
  RandomStream gen(derive_stream(seed, "inst", uint64_t(i)));
  uint32_t nfree = (i % 10 == 0) ? 16 : uint32_t(2 + gen.uniform_int(15));
  std::vector<uint32_t> depth = {0};
  std::vector<std::pair<uint32_t, uint32_t>> edges;
  for (uint32_t v = 1; v <= nfree; ++v) {
    uint32_t p;
    do {
      p = uint32_t(gen.uniform_int(v));
    } while (depth[p] >= 4);
    edges.emplace_back(p, v);
    depth.push_back(depth[p] + 1);
  }
  if (gen.uniform_int(3) == 0) edges.push_back(edges[gen.uniform_int(edges.size())]);
  ChainInstance inst;
  inst.g = graph_from_edges(nfree + 1, edges, 0);
  const double lambdas[] = {0.15, 0.3, 0.45};
  inst.lambda = lambdas[i % 3];
  const bool two_pinned = (i % 4 == 3);
  inst.var = two_pinned ? Variant::both_fixed(0, 1) : Variant::root_added(0);
  inst.states = uint64_t(1) << (nfree + 1 - (two_pinned ? 2 : 1));
  return inst;
}

// Brute-force expansion check, independent of the certificate machinery.
inline bool brute_force_expander(const HalfEdgeGraph& g, const std::vector<uint32_t>& w0,
                                 double alpha, uint32_t R) {
  uint64_t amax = uint64_t(alpha * double(w0.size()) + 1e-9);
  for (uint64_t mask = 1; mask < (uint64_t(1) << w0.size()); ++mask) {
    std::vector<uint32_t> a;
    for (uint32_t i = 0; i < w0.size(); ++i)
      if (mask >> i & 1) a.push_back(w0[i]);
    if (a.size() > amax) continue;
    std::vector<uint32_t> dist(g.n, kUnreached), queue;
    for (uint32_t v : a) {
      dist[v] = 0;
      queue.push_back(v);
    }
    for (size_t head = 0; head < queue.size(); ++head) {
      uint32_t u = queue[head];
      if (dist[u] == R) continue;
      for (uint64_t h = g.he_begin(u); h < g.he_end(u); ++h) {
        uint32_t v = g.owner(g.matching[h]);
        if (dist[v] != kUnreached) continue;
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
    uint64_t hits = 0;
    for (uint32_t v : w0)
      if (dist[v] != kUnreached) ++hits;
    if (hits < 2 * a.size()) return false;
  }
  return true;
}

// 1. The excursion mean at the root factorizes over its subtrees; exact on
//    every rooted tree with at most 10 vertices, three infection rates.
inline void c01_excursion_product(Checker& ck) {
  auto families = rooted_trees(10);
  const double lambdas[] = {0.05, 0.2, 0.5};
  uint64_t count = 0;
  double worst = 0.0;
  for (int n = 1; n <= 10; ++n) {
    for (const auto& canon : families[n]) {
      auto t = with_parent(tree_from_canon(canon));
      for (double lam : lambdas) {
        auto rep = verify_recursion_tree(t, lam);
        worst = std::max(worst, rep.abs_error);
        ++count;
      }
    }
  }
  ck.note(str("%llu tree/rate pairs, worst |lhs-rhs| = %.3g", (unsigned long long)count, worst));
  ck.require(count == 3615, "expected 1205 trees x 3 rates");
  ck.require(worst <= 1e-9, "identity error above 1e-9");
}

// 2. 1/pi(empty) = 1 + (exit rate) * (mean return time) on 30 random chains.
inline void c02_stationary_return(Checker& ck) {
  double worst = 0.0;
  uint64_t max_states = 0;
  for (int i = 0; i < 30; ++i) {
    auto inst = chain_instance(202, i);
    auto rep = verify_stationary_identity(inst.g, inst.var, inst.lambda);
    worst = std::max(worst, rep.identity_error);
    max_states = std::max(max_states, inst.states);
  }
  ck.note(str("30 instances, largest chain %llu states, worst identity error = %.3g",
              (unsigned long long)max_states, worst));
  ck.require(max_states == (uint64_t(1) << 16), "instance set should reach 2^16 states");
  ck.require(worst <= 1e-10, "identity error above 1e-10");
}

// 3. The dilated chain's stationary law equals the theta^{-r(x)} reweighting
//    of the undilated one, entry-wise, on the same instance set.
inline void c03_dilation_reweighting(Checker& ck) {
  double worst = 0.0;
  for (int i = 0; i < 30; ++i) {
    auto inst = chain_instance(202, i);
    for (double theta : {0.1, 0.5})
      worst = std::max(worst, delayed_reweight_error(inst.g, inst.var, inst.lambda, theta));
  }
  ck.note(str("30 instances x theta in {0.1, 0.5}, worst entry error = %.3g", worst));
  ck.require(worst <= 1e-10, "reweighting error above 1e-10");
}

// 4. Shared-clock couplings: set extinction time equals the max over
//    singleton starts; ignoring recoveries at a vertex dominates; a larger
//    initial set survives at least as long.
inline void c04_coupling_laws(Checker& ck) {
  const uint64_t seed = 404;
  uint64_t trials = 0, violations = 0;

  for (int k = 0; k < 4000; ++k) {
    RandomStream gen(derive_stream(seed, "union-g", uint64_t(k)));
    uint32_t n = uint32_t(5 + gen.uniform_int(46));
    auto g = erdos_renyi(n, 2.0, gen);
    double lam = 0.15 + 0.05 * double(k % 3);
    ClockStream clocks(derive_stream(seed, "union-c", uint64_t(k)), lam);
    std::vector<Variant> vars(n + 1, Variant::standard());
    std::vector<std::vector<uint32_t>> inits(n + 1);
    std::vector<uint32_t> all(n);
    for (uint32_t v = 0; v < n; ++v) {
      inits[v] = {v};
      all[v] = v;
    }
    inits[n] = all;
    auto traj = simulate_coupled(g, vars, inits, 5000.0, clocks);
    double mx = 0.0;
    for (uint32_t v = 0; v < n; ++v) mx = std::max(mx, traj[v].extinction_time);
    if (traj[n].extinction_time != mx) ++violations;
    ++trials;
  }

  for (int k = 0; k < 3000; ++k) {
    RandomStream gen(derive_stream(seed, "dom-g", uint64_t(k)));
    uint32_t n = uint32_t(5 + gen.uniform_int(46));
    auto g = erdos_renyi(n, 2.0, gen);
    uint32_t u = uint32_t(gen.uniform_int(n));
    double lam = 0.15 + 0.05 * double(k % 3);
    ClockStream clocks(derive_stream(seed, "dom-c", uint64_t(k)), lam);
    std::vector<Variant> vars = {Variant::standard(), Variant::ignoring_recovery_at(u)};
    std::vector<std::vector<uint32_t>> inits = {{u}, {u}};
    auto traj = simulate_coupled(g, vars, inits, 25.0, clocks);
    if (!(traj[0].extinction_time <= traj[1].extinction_time) || !traj[1].censored) ++violations;
    ++trials;
  }

  for (int k = 0; k < 3000; ++k) {
    RandomStream gen(derive_stream(seed, "attr-g", uint64_t(k)));
    uint32_t n = uint32_t(5 + gen.uniform_int(46));
    auto g = erdos_renyi(n, 2.0, gen);
    std::vector<uint32_t> perm(n);
    for (uint32_t v = 0; v < n; ++v) perm[v] = v;
    uint32_t bsize = uint32_t(1 + gen.uniform_int(n));
    for (uint32_t i = 0; i < bsize; ++i)
      std::swap(perm[i], perm[i + gen.uniform_int(n - i)]);
    std::vector<uint32_t> B(perm.begin(), perm.begin() + bsize);
    std::vector<uint32_t> A(B.begin(), B.begin() + (bsize + 1) / 2);
    double lam = 0.15 + 0.05 * double(k % 3);
    ClockStream clocks(derive_stream(seed, "attr-c", uint64_t(k)), lam);
    std::vector<Variant> vars(2, Variant::standard());
    std::vector<std::vector<uint32_t>> inits = {A, B};
    auto traj = simulate_coupled(g, vars, inits, 5000.0, clocks);
    if (!(traj[0].extinction_time <= traj[1].extinction_time)) ++violations;
    ++trials;
  }

  ck.note(str("%llu coupled trials, %llu violations", (unsigned long long)trials,
              (unsigned long long)violations));
  ck.require(trials == 10000, "expected 10^4 trials");
  ck.require(violations == 0, "coupling law violated");
}

// 5. Leaf excursions: mean 1 undilated and 1/theta dilated, exactly from the
//    solver and within 3 sigma from 10^5 Monte Carlo excursions.
inline void c05_excursion_base_cases(Checker& ck) {
  auto g = graph_from_edges(2, {{0, 1}}, 0);
  Variant plain = Variant::root_suppressed(0, 1);
  const double theta = 0.5;
  const double lam = 0.7;

  ChainSpec spec(g, plain, lam);
  std::vector<char> target = {1, 0};
  double h = hitting_time(spec, spec.pack({1}), target);
  ChainSpec slow(g, plain.with_theta(theta), lam);
  double h_slow = hitting_time(slow, slow.pack({1}), target);
  ck.note(str("oracle means %.15g and %.15g", h, h_slow));
  ck.require(std::abs(h - 1.0) <= 1e-12, "undilated excursion mean != 1");
  ck.require(std::abs(h_slow - 1.0 / theta) <= 1e-12, "dilated excursion mean != 1/theta");

  const uint32_t reps = 100000;
  auto mc = survival_time(g, lam, {1}, 1e4, reps, derive_stream(505, "mc"), plain);
  auto mc_slow =
      survival_time(g, lam, {1}, 1e4, reps, derive_stream(505, "mc-slow"), plain.with_theta(theta));
  double band = 3.0 * 1.0 / std::sqrt(double(reps));
  double band_slow = 3.0 * (1.0 / theta) / std::sqrt(double(reps));
  ck.note(str("mc means %.4f (band %.4f) and %.4f (band %.4f)", mc.mean, band, mc_slow.mean,
              band_slow));
  ck.require(mc.censored_fraction == 0.0 && mc_slow.censored_fraction == 0.0,
             "excursions should all finish");
  ck.require(std::abs(mc.mean - 1.0) <= band, "undilated mc mean outside 3 sigma");
  ck.require(std::abs(mc_slow.mean - 1.0 / theta) <= band_slow, "dilated mc mean outside 3 sigma");
}

// 6. Excursion depth tails on a branching tree of height 12: log-linear,
//    per-level decay factor below 1/2 at rate 0.05 and smaller at 0.02.
inline void c06_depth_tail(Checker& ck) {
  const uint64_t seed = 606;
  RootedTree tree;
  uint32_t attempt = 0;
  for (;; ++attempt) {
    if (attempt > 50) {
      ck.require(false, "no sizable tree in 50 draws");
      return;
    }
    RandomStream rng(derive_stream(seed, "tree", attempt));
    tree = gw_tree(DegreeDistribution::poisson(2.0), DegreeDistribution::poisson(2.0), 12, rng);
    if (tree.g.n >= 500) break;
  }
  auto tp = with_parent(tree);
  auto d1 = depth_excursion(tp, 0.05, 100000, derive_stream(seed, "x1"));
  // The faster-decaying comparison tail needs more excursions to populate
  // three depths past the root.
  auto d2 = depth_excursion(tp, 0.02, 400000, derive_stream(seed, "x2"));
  double r1 = std::exp(d1.slope), r2 = std::exp(d2.slope);

  std::vector<double> hs, lt;
  for (size_t h = 1; h < d1.count_ge.size(); ++h)
    if (d1.count_ge[h] >= 100) {
      hs.push_back(double(h));
      lt.push_back(std::log(double(d1.count_ge[h])));
    }
  auto lf = fit_line(hs, lt);
  ck.note(str("tree n = %u, ratios %.4f / %.4f over %u and %u depths, r2 = %.4f", tp.g.n, r1, r2,
              d1.fit_points, d2.fit_points, lf.r2));
  ck.require(d1.fit_points >= 3 && d2.fit_points >= 3, "too few well-sampled depths");
  ck.require(lf.r2 >= 0.95, "depth tail not log-linear");
  ck.require(r1 < 0.5, "decay factor >= 1/2 at rate 0.05");
  ck.require(r2 < r1, "decay factor did not shrink at rate 0.02");
}

// 7. Survival-time growth splits the rate axis: polynomial-like at 0.05,
//    exponential-like (>= 95% censored at horizon n) at 2.0.
inline void c07_phase_dichotomy(Checker& ck) {
  SweepSpec sp;
  sp.model = "config";
  sp.mu = DegreeDistribution::poisson(3.0);
  sp.ns = {200, 400, 800};
  sp.lambdas = {0.05, 2.0};
  sp.reps = 200;
  sp.horizon_scale = 1.0;
  sp.seed = 707;
  auto res = phase_sweep(sp);

  const PhaseFit* lo = nullptr;
  const PhaseFit* hi = nullptr;
  for (const auto& f : res.fits) (f.lambda < 1.0 ? lo : hi) = &f;
  ck.require(lo && hi, "missing a fitted rate");
  if (!lo || !hi) return;
  double min_censored = 1.0;
  for (const auto& row : res.rows)
    if (row.lambda > 1.0) min_censored = std::min(min_censored, row.censored);
  ck.note(str("low rate: %s, slope %.3f; high rate: %s, min censored %.3f", lo->label.c_str(),
              lo->loglog_slope, hi->label.c_str(), min_censored));
  ck.require(lo->label == "polynomial-like", "low rate not polynomial-like");
  ck.require(lo->loglog_slope <= 1.5, "low-rate growth exponent above 1.5");
  ck.require(hi->label.rfind("exponential-like", 0) == 0, "high rate not exponential-like");
  ck.require(min_censored >= 0.95, "under 95% censored at the high rate");
}

// 8. A stretched-exponential degree tail flips the same grid to
//    exponential-like at rate 0.1, where a Poisson(3) graph stays
//    polynomial-like.
inline void c08_heavy_tail_survival(Checker& ck) {
  SweepSpec sp;
  sp.model = "config";
  sp.mu = DegreeDistribution::stretched_exponential(1.1, 0.4, 1);
  sp.ns = {200, 400, 800};
  sp.lambdas = {0.1};
  sp.reps = 200;
  sp.horizon_scale = 1.0;
  sp.seed = 808;
  auto res = subexp_long_survival(sp);
  double top_censored = 0.0;
  for (const auto& row : res.rows)
    if (row.n == 800) top_censored = row.censored;
  ck.note(str("heavy tail: %s, censored at n=800: %.3f", res.fits[0].label.c_str(), top_censored));
  ck.require(res.fits[0].label.rfind("exponential-like", 0) == 0,
             "heavy-tailed graph not exponential-like");
  ck.require(top_censored >= 0.95, "heavy-tailed graph under 95% censored at n=800");

  SweepSpec ctr = sp;
  ctr.mu = DegreeDistribution::poisson(3.0);
  ctr.seed = 809;
  auto rc = phase_sweep(ctr);
  ck.note(str("light tail: %s, slope %.3f", rc.fits[0].label.c_str(), rc.fits[0].loglog_slope));
  ck.require(rc.fits[0].label == "polynomial-like", "light-tailed contrast not polynomial-like");
}

// 9. Uniform matching on degrees (2,1,1): the three pairings of the first
//    half-edge are equally likely (chi-square at the 10^-3 level).
inline void c09_matching_uniformity(Checker& ck) {
  RandomStream rng(derive_stream(909, "match"));
  uint64_t counts[3] = {0, 0, 0};
  const int runs = 30000;
  bool in_range = true;
  for (int k = 0; k < runs; ++k) {
    auto g = from_degrees_uniform_matching({2, 1, 1}, rng);
    uint32_t partner = g.matching[0];
    if (partner < 1 || partner > 3) {
      in_range = false;
      break;
    }
    ++counts[partner - 1];
  }
  double expect = double(runs) / 3.0;
  double chi2 = 0.0;
  for (uint64_t c : counts) chi2 += (double(c) - expect) * (double(c) - expect) / expect;
  ck.note(str("counts %llu/%llu/%llu, chi2 = %.3f", (unsigned long long)counts[0],
              (unsigned long long)counts[1], (unsigned long long)counts[2], chi2));
  ck.require(in_range, "first half-edge matched outside {1,2,3}");
  ck.require(chi2 <= 13.8155, "chi-square above the 10^-3 critical value");
}

// 10. Expansion certification: the sampled pipeline verifies a nonempty base
//     set on a 2000-vertex graph with >= 10^4 sampled subsets and zero
//     refutations, and exhaustive certificates match brute force on
//     hand-built 20-vertex instances.
inline void c10_expansion_certification(Checker& ck) {
  RandomStream grng(derive_stream(1010, "graph"));
  auto g = configuration_model(2000, DegreeDistribution::poisson(3.0), grng);
  PipelineConfig cfg;
  cfg.j = 8;
  cfg.r1 = 1;
  cfg.r = 2;
  cfg.rfrak = 10.0;
  cfg.m = 8;
  cfg.alpha = 0.05;
  cfg.verify_budget = 1;
  cfg.samples_per_size = 1000;
  cfg.seed = derive_stream(1010, "pipe");
  auto res = run_pipeline(g, DegreeDistribution::poisson(3.0), cfg);
  const auto& cert = res.cert;
  ck.note(str("pipeline |w0| = %zu, radius %u, %llu sampled checks", cert.w0.size(), cert.radius,
              (unsigned long long)cert.checks));
  ck.require(!cert.w0.empty(), "pipeline produced an empty base set");
  ck.require(!cert.exhaustive, "expected sampled verification");
  ck.require(cert.checks >= 10000, "fewer than 10^4 sampled subsets");
  ck.require(cert.outcome == CertOutcome::verified, "sampled verification found a refutation");

  std::vector<std::pair<uint32_t, uint32_t>> ring;
  for (uint32_t v = 0; v < 20; ++v) {
    ring.emplace_back(v, (v + 1) % 20);
    ring.emplace_back(v, (v + 7) % 20);
  }
  auto circulant = graph_from_edges(20, ring);
  std::vector<uint32_t> evens;
  for (uint32_t v = 0; v < 20; v += 2) evens.push_back(v);
  auto c1 = verify_expander(circulant, evens, 0.2, 2);
  bool b1 = brute_force_expander(circulant, evens, 0.2, 2);
  ck.require(c1.exhaustive, "circulant check should be exhaustive");
  ck.require((c1.outcome == CertOutcome::verified) == b1, "circulant: certificate != brute force");
  ck.require(b1, "circulant instance should expand");

  std::vector<std::pair<uint32_t, uint32_t>> split = {{0, 1}, {1, 2}, {2, 0},
                                                      {3, 4}, {4, 5}, {5, 3}};
  for (uint32_t v = 6; v < 19; ++v) split.emplace_back(v, v + 1);
  auto twin = graph_from_edges(20, split);
  std::vector<uint32_t> w0 = {0, 1, 2, 3, 4, 5};
  auto c2 = verify_expander(twin, w0, 0.5, 1);
  bool b2 = brute_force_expander(twin, w0, 0.5, 1);
  ck.require(c2.exhaustive, "split check should be exhaustive");
  ck.require((c2.outcome == CertOutcome::verified) == b2, "split: certificate != brute force");
  ck.require(c2.outcome == CertOutcome::refuted, "split instance should refute");
  ck.require(witness_valid(twin, c2), "refutation witness does not replay");
  ck.note(str("exhaustive agreement on %llu + %llu subsets", (unsigned long long)c1.checks,
              (unsigned long long)c2.checks));
}

// 11. Tail augmentation dominates empirical samples: >= 99 of 100 trials of
//     10^5 draws pass with removal budget n/3.
inline void c11_tail_domination(Checker& ck) {
  auto mu = DegreeDistribution::poisson(2.0);
  auto sharp = augment(mu);
  int dominated = 0;
  int worst_k = -1;
  for (int k = 0; k < 100; ++k) {
    RandomStream rng(derive_stream(1111, "dom", uint64_t(k)));
    auto samples = mu.sample_many(100000, rng);
    auto rep = domination_test(samples, 33333, sharp);
    if (rep.dominated)
      ++dominated;
    else
      worst_k = k;
  }
  ck.note(str("%d/100 trials dominated%s", dominated,
              worst_k >= 0 ? str(" (last failure at trial %d)", worst_k).c_str() : ""));
  ck.require(dominated >= 99, "fewer than 99 of 100 trials dominated");
}

struct CriterionSpec {
  const char* name;
  double budget_seconds;
  void (*fn)(Checker&);
};

inline const CriterionSpec kCriteria[kCriterionCount] = {
    {"excursion-product-identity", 10.0, c01_excursion_product},
    {"stationary-return-identity", 120.0, c02_stationary_return},
    {"dilation-reweighting", 120.0, c03_dilation_reweighting},
    {"coupling-laws", 60.0, c04_coupling_laws},
    {"excursion-base-cases", 30.0, c05_excursion_base_cases},
    {"depth-tail-decay", 300.0, c06_depth_tail},
    {"phase-dichotomy", 1800.0, c07_phase_dichotomy},
    {"heavy-tail-long-survival", 1800.0, c08_heavy_tail_survival},
    {"matching-uniformity", 10.0, c09_matching_uniformity},
    {"expansion-certification", 600.0, c10_expansion_certification},
    {"tail-domination", 60.0, c11_tail_domination},
};

}  // namespace detail

inline CriterionResult run_criterion(int id) {
  if (id < 1 || id > kCriterionCount) throw std::invalid_argument("criterion id out of range");
  const auto& spec = detail::kCriteria[id - 1];
  CriterionResult r;
  r.id = id;
  r.name = spec.name;
  r.budget_seconds = spec.budget_seconds;
  detail::Checker ck;
  auto t0 = std::chrono::steady_clock::now();
  try {
    spec.fn(ck);
  } catch (const std::exception& e) {
    ck.require(false, std::string("exception: ") + e.what());
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (r.seconds > spec.budget_seconds)
    ck.require(false, detail::str("runtime %.1fs over the %.0fs budget", r.seconds,
                                  spec.budget_seconds));
  r.pass = ck.ok;
  r.detail = ck.log;
  return r;
}

inline std::vector<CriterionResult> run_all() {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriterionCount; ++id) out.push_back(run_criterion(id));
  return out;
}

}  // namespace contagion::acceptance
