#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "contagion/distribution.hpp"
#include "contagion/graph.hpp"
#include "contagion/rng.hpp"

namespace contagion {

// ---------------------------------------------------------------------------
// Degree truncation

struct TruncationReport {
  uint32_t n_before = 0;
  uint32_t n_after = 0;
  uint64_t degree_before = 0;
  uint64_t degree_after = 0;
  double branching_rate = 0.0;     // of the surviving degree sequence
  uint64_t window_count = 0;       // surviving degrees in [j/2, 2j]
  std::vector<uint32_t> to_new;    // old id -> new id (kNoVertex if removed)
  std::vector<uint32_t> to_old;    // new id -> old id
};

// Drops every vertex of degree >= 2j+1 together with its half-edges and
// their matches; edges between survivors are kept.
inline HalfEdgeGraph truncate_degrees(const HalfEdgeGraph& g, uint32_t j,
                                      TruncationReport* rep = nullptr) {
  if (j < 1) throw std::invalid_argument("degree threshold must be at least 1");
  TruncationReport r;
  r.n_before = g.n;
  r.degree_before = g.num_half_edges();
  r.to_new.assign(g.n, kNoVertex);
  for (uint32_t v = 0; v < g.n; ++v) {
    if (g.degrees[v] <= 2 * j) {
      r.to_new[v] = uint32_t(r.to_old.size());
      r.to_old.push_back(v);
    }
  }
  if (r.to_old.empty()) throw std::runtime_error("truncation removed everything");

  std::vector<std::pair<uint32_t, uint32_t>> edges;
  for (uint64_t h = 0; h < g.num_half_edges(); ++h) {
    uint64_t m = g.matching[h];
    if (h >= m) continue;
    uint32_t a = r.to_new[g.owner(h)], b = r.to_new[g.owner(m)];
    if (a == kNoVertex || b == kNoVertex) continue;
    edges.emplace_back(a, b);
  }
  std::optional<uint32_t> root;
  if (g.root && r.to_new[*g.root] != kNoVertex) root = r.to_new[*g.root];
  auto out = graph_from_edges(uint32_t(r.to_old.size()), edges, root);

  r.n_after = out.n;
  r.degree_after = out.num_half_edges();
  double sum = 0.0, bias = 0.0;
  for (uint32_t v = 0; v < out.n; ++v) {
    double d = out.degrees[v];
    sum += d;
    bias += d * (d - 1.0);
    if (2 * out.degrees[v] >= j && out.degrees[v] <= 2 * j) ++r.window_count;
  }
  r.branching_rate = sum > 0 ? bias / sum : 0.0;
  if (rep) *rep = std::move(r);
  return out;
}

// ---------------------------------------------------------------------------
// Simultaneous ball growth

struct BallSystem {
  std::vector<uint32_t> centers;
  std::vector<uint32_t> radius;                 // reached radius per ball
  std::vector<uint32_t> owner;                  // per vertex: claiming ball or kNoVertex
  std::vector<std::vector<uint32_t>> touched_by;  // per vertex: all balls containing it
  uint32_t target_radius = 0;
  double fraction_full = 0.0;
};

// Grows all balls in lock step. A ball only grows while it intersects at
// most r_cap other balls; a branch already claimed by another ball is not
// explored past the shared vertex, but the contact is recorded.
inline BallSystem explore_balls(const HalfEdgeGraph& g, const std::vector<uint32_t>& w,
                                uint32_t R, double r_cap) {
  if (w.empty()) throw std::invalid_argument("ball exploration needs a nonempty seed set");
  const uint32_t B = uint32_t(w.size());
  BallSystem bs;
  bs.centers = w;
  bs.radius.assign(B, 0);
  bs.owner.assign(g.n, kNoVertex);
  bs.touched_by.assign(g.n, {});
  bs.target_radius = R;

  std::vector<std::unordered_set<uint32_t>> isect(B);
  std::vector<std::vector<uint32_t>> frontier(B);
  std::vector<char> active(B, 1);

  for (uint32_t i = 0; i < B; ++i) {
    uint32_t v = w[i];
    if (bs.owner[v] == kNoVertex) {
      bs.owner[v] = i;
      bs.touched_by[v].push_back(i);
      frontier[i].push_back(v);
    } else {
      for (uint32_t b : bs.touched_by[v]) {
        isect[i].insert(b);
        isect[b].insert(i);
      }
      bs.touched_by[v].push_back(i);
    }
  }

  for (uint32_t r = 1; r <= R; ++r) {
    for (uint32_t i = 0; i < B; ++i) {
      if (!active[i]) continue;
      if (double(isect[i].size()) > r_cap) {
        active[i] = 0;
        continue;
      }
      std::vector<uint32_t> next;
      for (uint32_t u : frontier[i]) {
        for (uint64_t h = g.he_begin(u); h < g.he_end(u); ++h) {
          uint32_t v = g.owner(g.matching[h]);
          if (v == u) continue;
          if (bs.owner[v] == kNoVertex) {
            bs.owner[v] = i;
            bs.touched_by[v].push_back(i);
            next.push_back(v);
          } else if (bs.owner[v] != i) {
            auto& tb = bs.touched_by[v];
            if (std::find(tb.begin(), tb.end(), i) == tb.end()) {
              for (uint32_t b : tb) {
                isect[i].insert(b);
                isect[b].insert(i);
              }
              tb.push_back(i);
            }
          }
        }
      }
      frontier[i] = std::move(next);
      bs.radius[i] = r;
    }
  }
  uint32_t full = 0;
  for (uint32_t i = 0; i < B; ++i)
    if (bs.radius[i] == R) ++full;
  bs.fraction_full = double(full) / B;
  return bs;
}

// ---------------------------------------------------------------------------
// Quotient graph

struct QuotientResult {
  HalfEdgeGraph g;                      // supervertices first, then untouched vertices
  std::vector<uint32_t> vertex_map;     // input vertex -> quotient vertex (balls win)
  std::vector<uint64_t> boundary_count; // per supervertex
  uint32_t num_super = 0;
};

// Collapses each ball to a supervertex. A half-edge sitting on several
// balls is assigned to one of them uniformly at random; pairs internal to
// one supervertex are dropped, so a supervertex's degree is exactly its
// unmatched boundary count.
inline QuotientResult build_quotient(const HalfEdgeGraph& g, const BallSystem& balls,
                                     RandomStream& rng) {
  QuotientResult q;
  const uint32_t B = uint32_t(balls.centers.size());
  q.num_super = B;
  q.vertex_map.assign(g.n, kNoVertex);
  uint32_t next_id = B;
  for (uint32_t v = 0; v < g.n; ++v)
    q.vertex_map[v] = balls.touched_by[v].empty() ? next_id++ : kNoVertex;

  std::vector<uint32_t> he_target(g.num_half_edges());
  for (uint32_t v = 0; v < g.n; ++v) {
    const auto& tb = balls.touched_by[v];
    for (uint64_t h = g.he_begin(v); h < g.he_end(v); ++h) {
      if (tb.empty())
        he_target[h] = q.vertex_map[v];
      else if (tb.size() == 1)
        he_target[h] = tb[0];
      else
        he_target[h] = tb[rng.uniform_int(tb.size())];
    }
  }
  for (uint32_t v = 0; v < g.n; ++v) {
    if (balls.touched_by[v].empty()) continue;
    // a swallowed vertex mapping is ambiguous; keep its owner for reference
    q.vertex_map[v] = balls.owner[v];
  }

  std::vector<std::pair<uint32_t, uint32_t>> edges;
  for (uint64_t h = 0; h < g.num_half_edges(); ++h) {
    uint64_t m = g.matching[h];
    if (h >= m) continue;
    uint32_t a = he_target[h], b = he_target[m];
    if (a == b && a < B) continue;  // internal to one ball
    edges.emplace_back(a, b);
  }
  q.g = graph_from_edges(next_id, edges);
  q.boundary_count.assign(B, 0);
  for (uint32_t s = 0; s < B; ++s) q.boundary_count[s] = q.g.degrees[s];
  return q;
}

// ---------------------------------------------------------------------------
// Blue marking and core peeling

struct BlueMarking {
  std::vector<uint32_t> candidates;
  std::vector<char> blue;        // per half-edge of the quotient graph
  uint64_t m = 0;                // marks per candidate
  uint64_t blue_pairs = 0;       // matched pairs with both sides blue
  double theta = 0.0;            // 2*blue_pairs / (m * |candidates|)
};

// Marks exactly m half-edges per candidate, uniformly at random.
inline BlueMarking mark_blue(const HalfEdgeGraph& g, const std::vector<uint32_t>& candidates,
                             uint64_t m, RandomStream& rng) {
  if (m < 1) throw std::invalid_argument("mark count must be positive");
  BlueMarking bm;
  bm.candidates = candidates;
  bm.m = m;
  bm.blue.assign(g.num_half_edges(), 0);
  std::vector<uint64_t> pool;
  for (uint32_t c : candidates) {
    if (g.degrees[c] < m) throw std::invalid_argument("candidate degree below mark count");
    pool.clear();
    for (uint64_t h = g.he_begin(c); h < g.he_end(c); ++h) pool.push_back(h);
    for (uint64_t k = 0; k < m; ++k) {
      uint64_t pick = k + rng.uniform_int(pool.size() - k);
      std::swap(pool[k], pool[pick]);
      bm.blue[pool[k]] = 1;
    }
  }
  for (uint64_t h = 0; h < g.num_half_edges(); ++h) {
    uint64_t p = g.matching[h];
    if (h < p && bm.blue[h] && bm.blue[p]) ++bm.blue_pairs;
  }
  if (!candidates.empty())
    bm.theta = 2.0 * double(bm.blue_pairs) / (double(m) * double(candidates.size()));
  return bm;
}

// Peels the realized blue-blue multigraph on the candidates down to its
// s-core: repeatedly removes any candidate with fewer than s blue
// half-edges whose blue partners still belong to surviving candidates.
inline std::vector<uint32_t> peel_core(const HalfEdgeGraph& g, const BlueMarking& bm,
                                       uint64_t s) {
  if (s < 1) throw std::invalid_argument("core threshold must be at least 1");
  std::vector<uint32_t> slot(g.n, kNoVertex);
  for (uint32_t i = 0; i < bm.candidates.size(); ++i) slot[bm.candidates[i]] = i;

  std::vector<uint64_t> deg(bm.candidates.size(), 0);
  for (uint32_t i = 0; i < bm.candidates.size(); ++i) {
    uint32_t c = bm.candidates[i];
    for (uint64_t h = g.he_begin(c); h < g.he_end(c); ++h) {
      uint64_t p = g.matching[h];
      if (bm.blue[h] && bm.blue[p] && slot[g.owner(p)] != kNoVertex) ++deg[i];
    }
  }

  std::vector<char> removed(bm.candidates.size(), 0);
  std::deque<uint32_t> queue;
  for (uint32_t i = 0; i < bm.candidates.size(); ++i)
    if (deg[i] < s) queue.push_back(i);
  while (!queue.empty()) {
    uint32_t i = queue.front();
    queue.pop_front();
    if (removed[i]) continue;
    removed[i] = 1;
    uint32_t c = bm.candidates[i];
    for (uint64_t h = g.he_begin(c); h < g.he_end(c); ++h) {
      uint64_t p = g.matching[h];
      if (!bm.blue[h] || !bm.blue[p]) continue;
      uint32_t j = slot[g.owner(p)];
      if (j == kNoVertex || removed[j]) continue;
      if (deg[j]-- == s) queue.push_back(j);
    }
  }
  std::vector<uint32_t> core;
  for (uint32_t i = 0; i < bm.candidates.size(); ++i)
    if (!removed[i]) core.push_back(bm.candidates[i]);
  return core;
}

// ---------------------------------------------------------------------------
// Expansion certificates

enum class CertOutcome { verified, refuted, inconclusive };

struct ExpanderParams {
  uint32_t j = 0;
  uint32_t r1 = 0;
  uint32_t r = 0;
  double rfrak = 0.0;
  uint64_t m = 0;
  double theta_core = 0.0;
  double head_display = 0.0;  // substituted-back value targeting 1e-4
  double tail_display = 0.0;  // substituted-back value targeting rfrak/10
  bool feasible = true;
  std::string reason;
};

struct ExpanderCertificate {
  std::vector<uint32_t> w0;
  double alpha = 0.0;
  uint32_t radius = 0;
  bool exhaustive = true;
  uint64_t checks = 0;
  uint64_t samples_per_size = 0;
  CertOutcome outcome = CertOutcome::inconclusive;
  std::vector<uint32_t> witness;
  uint64_t graph_hash = 0;
  bool empty_w0 = false;
  ExpanderParams params;
};

namespace detail {

// Number of vertices within distance R of A that lie in w0 (membership mask).
inline uint64_t expansion_count(const HalfEdgeGraph& g, const std::vector<uint32_t>& a,
                                uint32_t R, const std::vector<char>& in_w0,
                                std::vector<uint32_t>& stamp, uint32_t& epoch,
                                std::vector<uint32_t>& queue) {
  ++epoch;
  queue.clear();
  uint64_t hits = 0;
  for (uint32_t v : a) {
    if (stamp[v] == epoch) continue;
    stamp[v] = epoch;
    queue.push_back(v);
    if (in_w0[v]) ++hits;
  }
  size_t head = 0, level_end = queue.size();
  for (uint32_t depth = 0; depth < R && head < queue.size(); ++depth) {
    for (; head < level_end; ++head) {
      uint32_t u = queue[head];
      for (uint64_t h = g.he_begin(u); h < g.he_end(u); ++h) {
        uint32_t v = g.owner(g.matching[h]);
        if (stamp[v] == epoch) continue;
        stamp[v] = epoch;
        queue.push_back(v);
        if (in_w0[v]) ++hits;
      }
    }
    level_end = queue.size();
  }
  return hits;
}

inline double log_subset_count(uint64_t n, uint64_t amax) {
  double total = 0.0;
  double log_c = 0.0;
  for (uint64_t m = 1; m <= amax; ++m) {
    log_c += std::log(double(n - m + 1)) - std::log(double(m));
    total += std::exp(std::min(log_c, 700.0));
    if (total > 1e18) return 1e18;
  }
  return total;
}

}  // namespace detail

// Checks |N(A,R) ∩ W0| >= 2|A| over subsets A of w0 with |A| <= alpha|w0|.
// Exhaustive when the subset family fits the budget, otherwise stratified
// random sampling; a sampled "verified" is a statistical statement, not a
// proof, and the certificate records the mode.
inline ExpanderCertificate verify_expander(const HalfEdgeGraph& g,
                                           const std::vector<uint32_t>& w0, double alpha,
                                           uint32_t R, uint64_t budget = 10000000,
                                           uint64_t samples_per_size = 10000,
                                           uint64_t seed = 1) {
  if (w0.empty()) throw std::invalid_argument("empty base set");
  if (alpha <= 0.0 || alpha > 1.0) throw std::invalid_argument("alpha must be in (0,1]");
  ExpanderCertificate cert;
  cert.w0 = w0;
  cert.alpha = alpha;
  cert.radius = R;
  cert.graph_hash = g.hash();
  cert.samples_per_size = 0;

  std::vector<char> in_w0(g.n, 0);
  for (uint32_t v : w0) in_w0[v] = 1;
  const uint64_t amax = uint64_t(alpha * double(w0.size()) + 1e-9);
  std::vector<uint32_t> stamp(g.n, 0), queue;
  uint32_t epoch = 0;

  auto check = [&](const std::vector<uint32_t>& a) {
    ++cert.checks;
    return detail::expansion_count(g, a, R, in_w0, stamp, epoch, queue) >= 2 * a.size();
  };

  if (amax == 0) {
    cert.outcome = CertOutcome::verified;  // no subset is within scope
    return cert;
  }

  cert.exhaustive = detail::log_subset_count(w0.size(), amax) <= double(budget);
  if (cert.exhaustive) {
    std::vector<uint32_t> idx, a;
    for (uint64_t m = 1; m <= amax; ++m) {
      idx.resize(m);
      for (uint64_t i = 0; i < m; ++i) idx[i] = uint32_t(i);
      while (true) {
        a.clear();
        for (uint32_t i : idx) a.push_back(w0[i]);
        if (!check(a)) {
          cert.outcome = CertOutcome::refuted;
          cert.witness = a;
          return cert;
        }
        // next lexicographic combination
        int64_t pos = int64_t(m) - 1;
        while (pos >= 0 && idx[pos] == uint32_t(w0.size() - m + pos)) --pos;
        if (pos < 0) break;
        ++idx[pos];
        for (uint64_t i = pos + 1; i < m; ++i) idx[i] = idx[i - 1] + 1;
      }
    }
    cert.outcome = CertOutcome::verified;
    return cert;
  }

  cert.samples_per_size = samples_per_size;
  std::vector<uint32_t> pool(w0);
  for (uint64_t m = 1; m <= amax; ++m) {
    RandomStream rng(derive_stream(seed, "certsample", m));
    for (uint64_t rep = 0; rep < samples_per_size; ++rep) {
      for (uint64_t k = 0; k < m; ++k) {
        uint64_t pick = k + rng.uniform_int(pool.size() - k);
        std::swap(pool[k], pool[pick]);
      }
      std::vector<uint32_t> a(pool.begin(), pool.begin() + m);
      if (!check(a)) {
        cert.outcome = CertOutcome::refuted;
        cert.witness = a;
        return cert;
      }
    }
  }
  cert.outcome = CertOutcome::verified;
  return cert;
}

// Re-validates a refuted certificate's witness from scratch.
inline bool witness_valid(const HalfEdgeGraph& g, const ExpanderCertificate& cert) {
  if (cert.outcome != CertOutcome::refuted || cert.witness.empty()) return false;
  if (cert.witness.size() > uint64_t(cert.alpha * double(cert.w0.size()) + 1e-9)) return false;
  std::vector<char> in_w0(g.n, 0);
  for (uint32_t v : cert.w0) in_w0[v] = 1;
  for (uint32_t v : cert.witness)
    if (!in_w0[v]) return false;
  std::vector<uint32_t> stamp(g.n, 0), queue;
  uint32_t epoch = 0;
  uint64_t hits =
      detail::expansion_count(g, cert.witness, cert.radius, in_w0, stamp, epoch, queue);
  return hits < 2 * cert.witness.size();
}

// ---------------------------------------------------------------------------
// Parameter selection

struct MuStats {
  double bbar = 0.0;  // branching rate after truncation
  double d = 0.0;     // mean degree
  double uj = 0.0;    // high-degree window mass
};

struct ParamConstants {
  double eps = 0.5;
  double epsp = 0.1;
  double epspp = 0.1;
  uint32_t r0 = 2;
};

// Solves the three defining displays for (R1, rfrak, R), then the marked
// half-edge count and the core density lower bound, and checks the
// feasibility constraints. Substituted-back display values are reported so
// the integer-rounding slack is visible.
inline ExpanderParams choose_parameters(const MuStats& s, uint32_t j,
                                        const ParamConstants& c = {}) {
  if (s.bbar <= 1.0) throw std::invalid_argument("subcritical degree sequence");
  ExpanderParams p;
  p.j = j;
  auto infeasible = [&](const std::string& why) {
    p.feasible = false;
    p.reason = why;
    return p;
  };
  if (s.uj <= 0.0) return infeasible("no high-degree seed mass");
  const double gb = s.bbar * (1.0 - c.epspp);
  if (gb <= 1.0) return infeasible("effective growth rate not above one");
  const double jj = double(j) * double(j);
  const double lb = std::log(s.bbar);

  double x1 = std::log(1e-4 * s.d / (jj * s.uj)) / lb;
  p.r1 = uint32_t(std::max<int64_t>(1, int64_t(std::ceil((x1 + 1.0) / 2.0))));
  p.rfrak = c.epsp * c.epsp * std::pow(gb, double(p.r1) - 1.0) * double(j) / 800.0;
  double x2 = std::log(p.rfrak / 10.0 * s.d / (jj * s.uj)) / lb;
  p.r = uint32_t(std::max<int64_t>(int64_t(p.r1) + 1, int64_t(std::ceil((x2 + 1.0) / 2.0))));

  double md = c.epsp * c.epsp * c.epsp * std::pow(gb, double(p.r) - 1.0) * double(j) / 8.0;
  p.m = md > 1e18 ? uint64_t(1e18) : uint64_t(md);
  p.theta_core = c.epsp * s.uj * double(p.m) / (60.0 * s.d);
  p.head_display = std::pow(s.bbar, 2.0 * p.r1 - 1.0) * jj * s.uj / s.d;
  p.tail_display = std::pow(s.bbar, 2.0 * p.r - 1.0) * jj * s.uj / s.d;

  if (p.rfrak < 1.0) return infeasible("intersection budget below one");
  if (p.m < 1) return infeasible("no half-edges to mark");
  if (p.r <= p.r1 || std::min(p.r1, p.r - p.r1) < c.r0)
    return infeasible("radius split below the floor");
  if (p.theta_core * double(p.m) < 100.0) return infeasible("expected core degree too small");
  return p;
}

// ---------------------------------------------------------------------------
// Full pipeline

struct PipelineConfig {
  uint32_t j = 8;
  ParamConstants constants;
  bool auto_params = false;
  // manual stage parameters, used unless auto_params
  uint32_t r1 = 1;
  uint32_t r = 2;
  double rfrak = 10.0;
  uint64_t m = 4;
  double alpha = 0.1;
  double uj = -1.0;  // < 0: use the distribution's tail at j
  uint64_t verify_budget = 10000000;
  uint64_t samples_per_size = 10000;
  uint64_t seed = 1;
};

struct PipelineStages {
  bool truncated = false;
  TruncationReport trunc;
  uint64_t w_size = 0;
  double fraction_full = 0.0;
  uint32_t quotient_n = 0;
  uint64_t candidate_count = 0;
  uint64_t blue_pairs = 0;
  double theta = 0.0;
  uint64_t core_threshold = 0;
  uint64_t core_size = 0;
  uint64_t max_core_degree = 0;
  double degree_cap = 0.0;  // (2j)^R
};

struct PipelineResult {
  ExpanderCertificate cert;
  PipelineStages stages;
};

// truncate -> select W -> explore -> quotient -> mark -> peel -> map the
// surviving supervertices back to their ball centers -> certify on the
// original graph at radius 2R+1.
inline PipelineResult run_pipeline(const HalfEdgeGraph& g, const DegreeDistribution& mu,
                                   const PipelineConfig& cfg) {
  PipelineResult res;
  auto& st = res.stages;
  auto& cert = res.cert;
  cert.graph_hash = g.hash();
  cert.alpha = cfg.alpha;

  // Stage 1: truncation, or the finite-support branch that skips it.
  HalfEdgeGraph gbar;
  std::vector<uint32_t> w;
  const bool finite = mu.tail_class() == TailClass::finite_support;
  uint32_t j = cfg.j;
  double uj;
  double bbar;
  RandomStream thin_rng(derive_stream(cfg.seed, "thin"));
  if (finite) {
    j = mu.kmax();
    gbar = g;
    double pj = mu.pmf(j);
    uj = cfg.uj > 0 ? cfg.uj : pj / 2.0;
    if (uj > pj) throw std::invalid_argument("thinning mass exceeds the top atom");
    for (uint32_t v = 0; v < g.n; ++v)
      if (g.degrees[v] == j && thin_rng.uniform() < uj / pj) w.push_back(v);
    double sum = 0.0, bias = 0.0;
    for (uint32_t v = 0; v < g.n; ++v) {
      sum += g.degrees[v];
      bias += double(g.degrees[v]) * (g.degrees[v] - 1.0);
    }
    bbar = sum > 0 ? bias / sum : 0.0;
    st.trunc.to_old.resize(g.n);
    for (uint32_t v = 0; v < g.n; ++v) st.trunc.to_old[v] = v;
  } else {
    st.truncated = true;
    gbar = truncate_degrees(g, j, &st.trunc);
    uj = cfg.uj > 0 ? cfg.uj : mu.tail(j - 1);
    bbar = st.trunc.branching_rate;
    for (uint32_t v = 0; v < gbar.n; ++v)
      if (2 * gbar.degrees[v] >= j && gbar.degrees[v] <= 2 * j) w.push_back(v);
  }
  st.w_size = w.size();

  // Stage 2: parameters.
  ExpanderParams params;
  if (cfg.auto_params) {
    if (bbar <= 1.0) {
      cert.params.feasible = false;
      cert.params.reason = "subcritical degree sequence";
      cert.outcome = CertOutcome::inconclusive;
      return res;
    }
    params = choose_parameters({bbar, mu.mean(), uj}, j, cfg.constants);
    if (!params.feasible) {
      cert.params = params;
      cert.outcome = CertOutcome::inconclusive;
      return res;
    }
  } else {
    params.j = j;
    params.r1 = cfg.r1;
    params.r = cfg.r;
    params.rfrak = cfg.rfrak;
    params.m = cfg.m;
  }
  cert.params = params;
  st.degree_cap = std::pow(2.0 * double(j), double(params.r));

  auto empty_result = [&]() {
    cert.outcome = CertOutcome::refuted;
    cert.empty_w0 = true;
    return res;
  };
  if (w.empty()) return empty_result();

  // Stage 3-4: balls and quotient.
  auto balls = explore_balls(gbar, w, params.r, 100.0 * params.rfrak);
  st.fraction_full = balls.fraction_full;
  RandomStream qrng(derive_stream(cfg.seed, "quotient"));
  auto quot = build_quotient(gbar, balls, qrng);
  st.quotient_n = quot.g.n;

  // Stage 5: candidates, marking, core.
  std::vector<uint32_t> candidates;
  for (uint32_t s = 0; s < quot.num_super; ++s)
    if (quot.boundary_count[s] >= params.m) candidates.push_back(s);
  st.candidate_count = candidates.size();
  if (candidates.empty()) return empty_result();

  RandomStream brng(derive_stream(cfg.seed, "blue"));
  auto marking = mark_blue(quot.g, candidates, params.m, brng);
  st.blue_pairs = marking.blue_pairs;
  st.theta = marking.theta;
  cert.params.theta_core = marking.theta;
  uint64_t s_thr = std::max<uint64_t>(1, uint64_t(std::llround(marking.theta * double(params.m) / 20.0)));
  st.core_threshold = s_thr;
  auto core = peel_core(quot.g, marking, s_thr);
  st.core_size = core.size();
  for (uint32_t c : core)
    st.max_core_degree = std::max<uint64_t>(st.max_core_degree, quot.g.degrees[c]);
  if (core.empty()) return empty_result();

  // Stage 6: map supervertices back to centers on the original graph.
  std::vector<uint32_t> w0;
  for (uint32_t c : core) {
    uint32_t center_bar = balls.centers[c];
    w0.push_back(st.truncated ? st.trunc.to_old[center_bar] : center_bar);
  }
  std::sort(w0.begin(), w0.end());

  cert = verify_expander(g, w0, cfg.alpha, 2 * params.r + 1, cfg.verify_budget,
                         cfg.samples_per_size, derive_stream(cfg.seed, "cert"));
  cert.params = params;
  cert.params.theta_core = marking.theta;
  return res;
}

}  // namespace contagion
