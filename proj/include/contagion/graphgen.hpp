#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "contagion/distribution.hpp"
#include "contagion/graph.hpp"
#include "contagion/rng.hpp"

namespace contagion {

constexpr uint64_t kDefaultNodeCap = 10000000;
constexpr int kRejectionCap = 1000000;

inline std::vector<uint64_t> shuffled_ids(uint64_t count, RandomStream& rng) {
  std::vector<uint64_t> ids(count);
  std::iota(ids.begin(), ids.end(), 0);
  for (uint64_t i = count; i > 1; --i) std::swap(ids[i - 1], ids[rng.uniform_int(i)]);
  return ids;
}

inline HalfEdgeGraph from_degrees_uniform_matching(const std::vector<uint32_t>& degrees,
                                                   RandomStream& rng) {
  HalfEdgeGraph g;
  g.n = uint32_t(degrees.size());
  g.degrees = degrees;
  g.he_offset.assign(size_t(g.n) + 1, 0);
  for (uint32_t v = 0; v < g.n; ++v) g.he_offset[v + 1] = g.he_offset[v] + degrees[v];
  uint64_t total = g.he_offset[g.n];
  if (total % 2 != 0) throw std::invalid_argument("odd half-edge total");
  g.matching.assign(total, 0);
  auto ids = shuffled_ids(total, rng);
  for (uint64_t i = 0; i + 1 < total; i += 2) {
    g.matching[ids[i]] = ids[i + 1];
    g.matching[ids[i + 1]] = ids[i];
  }
  g.build_owner_map();
  return g;
}

// i.i.d. mu-degrees conditioned on even sum (whole-vector rejection), then a
// uniform perfect matching of the half-edges. Loops and multi-edges retained.
inline HalfEdgeGraph configuration_model(uint32_t n, const DegreeDistribution& mu,
                                         RandomStream& rng) {
  if (n < 2) throw std::invalid_argument("configuration_model: n >= 2 required");
  std::vector<uint32_t> degrees;
  for (int attempt = 0; attempt < kRejectionCap; ++attempt) {
    degrees = mu.sample_many(n, rng);
    uint64_t sum = std::accumulate(degrees.begin(), degrees.end(), uint64_t(0));
    if (sum % 2 == 0) return from_degrees_uniform_matching(degrees, rng);
  }
  throw std::runtime_error("even-sum conditioning infeasible");
}

struct CutoffStep {
  uint64_t selected = 0;
  uint64_t partner = 0;
  double line = 1.0;
};

struct CutoffResult {
  HalfEdgeGraph g;
  double final_line = 1.0;
  std::vector<CutoffStep> trace;
};

// The selection callback sees only which half-edges are already matched; it
// must return an unmatched id (independence from the hidden heights is then
// automatic). Default: lowest unmatched id.
using CutoffSelection = std::function<uint64_t(const std::vector<char>& matched)>;

inline CutoffResult cutoff_line_match(const std::vector<uint32_t>& degrees,
                                      RandomStream& rng,
                                      const CutoffSelection& selection = {}) {
  uint64_t total = std::accumulate(degrees.begin(), degrees.end(), uint64_t(0));
  if (total % 2 != 0) throw std::invalid_argument("odd half-edge total");
  std::vector<double> height(total);
  for (auto& x : height) x = rng.uniform_open();

  std::vector<uint64_t> by_height(total);
  std::iota(by_height.begin(), by_height.end(), 0);
  std::sort(by_height.begin(), by_height.end(),
            [&](uint64_t a, uint64_t b) { return height[a] > height[b]; });

  CutoffResult res;
  res.g.n = uint32_t(degrees.size());
  res.g.degrees = degrees;
  res.g.he_offset.assign(degrees.size() + 1, 0);
  for (size_t v = 0; v < degrees.size(); ++v)
    res.g.he_offset[v + 1] = res.g.he_offset[v] + degrees[v];
  res.g.matching.assign(total, total);  // sentinel: unmatched

  std::vector<char> matched(total, 0);
  size_t cursor = 0;
  for (uint64_t step = 0; step < total / 2; ++step) {
    uint64_t sel;
    if (selection) {
      sel = selection(matched);
      if (sel >= total || matched[sel])
        throw std::runtime_error("cutoff selection returned a matched half-edge");
    } else {
      sel = 0;
      while (sel < total && matched[sel]) ++sel;
    }
    matched[sel] = 1;
    while (cursor < total && matched[by_height[cursor]]) ++cursor;
    uint64_t partner = by_height[cursor];
    matched[partner] = 1;
    res.g.matching[sel] = partner;
    res.g.matching[partner] = sel;
    res.final_line = height[partner];
    res.trace.push_back({sel, partner, res.final_line});
  }
  res.g.build_owner_map();
  return res;
}

namespace detail {
struct TreeScaffold {
  std::vector<uint32_t> parent;
  std::vector<uint32_t> depth;
};

// BFS generation; children of v get consecutive ids
inline TreeScaffold grow_tree(const DegreeDistribution& offspring,
                              const DegreeDistribution& root_law, uint32_t L, RandomStream& rng,
                              uint64_t node_cap) {
  TreeScaffold t;
  t.parent.push_back(kNoVertex);
  t.depth.push_back(0);
  for (size_t i = 0; i < t.parent.size(); ++i) {
    uint32_t d = t.depth[i];
    if (d >= L) continue;
    uint32_t kids = d == 0 ? root_law.sample(rng) : offspring.sample(rng);
    for (uint32_t c = 0; c < kids; ++c) {
      t.parent.push_back(uint32_t(i));
      t.depth.push_back(d + 1);
      if (t.parent.size() > node_cap) throw std::runtime_error("tree node cap exceeded");
    }
  }
  return t;
}
}  // namespace detail

// GW(root_law, offspring)_L rooted at vertex 0; root_law = offspring gives the
// plain GW(xi)_L, root_law = mu with offspring = size_biased(mu) gives the
// local-limit tree of the configuration model.
inline RootedTree gw_tree(const DegreeDistribution& offspring, const DegreeDistribution& root_law,
                          uint32_t L, RandomStream& rng, uint64_t node_cap = kDefaultNodeCap) {
  auto t = detail::grow_tree(offspring, root_law, L, rng, node_cap);
  std::vector<std::pair<uint32_t, uint32_t>> edges;
  edges.reserve(t.parent.size() - 1);
  for (uint32_t v = 1; v < t.parent.size(); ++v) edges.emplace_back(t.parent[v], v);
  RootedTree tree;
  tree.g = graph_from_edges(uint32_t(t.parent.size()), edges, 0);
  tree.rho = 0;
  tree.L = L;
  return tree;
}

// Insert a permanently pinned parent above the root: new vertex 0 = rho_plus,
// all original ids shift by one.
inline RootedTree with_parent(const RootedTree& t) {
  if (t.rho_plus) throw std::invalid_argument("tree already has a pinned parent");
  std::vector<std::pair<uint32_t, uint32_t>> edges;
  edges.emplace_back(0, t.rho + 1);
  for (uint64_t h = 0; h < t.g.num_half_edges(); ++h) {
    uint64_t m = t.g.matching[h];
    if (h < m) edges.emplace_back(t.g.he_owner[h] + 1, t.g.he_owner[m] + 1);
  }
  RootedTree out;
  out.g = graph_from_edges(t.g.n + 1, edges, 0);
  out.rho = t.rho + 1;
  out.rho_plus = 0;
  out.L = t.L;
  return out;
}

// Cycle of length s rooted at vertex 0 with independent GW(offspring)_L trees
// hung at the s-1 non-root cycle vertices. s=2 is a double edge.
inline HalfEdgeGraph gwc(const DegreeDistribution& offspring, uint32_t s, uint32_t L,
                         RandomStream& rng, uint64_t node_cap = kDefaultNodeCap) {
  if (s < 2) throw std::invalid_argument("gwc: cycle length >= 2 required");
  std::vector<std::pair<uint32_t, uint32_t>> edges;
  if (s == 2) {
    edges.emplace_back(0, 1);
    edges.emplace_back(0, 1);
  } else {
    for (uint32_t i = 0; i < s; ++i) edges.emplace_back(i, (i + 1) % s);
  }
  uint32_t next = s;
  for (uint32_t c = 1; c < s; ++c) {
    auto t = detail::grow_tree(offspring, offspring, L, rng, node_cap);
    // scaffold vertex 0 is the cycle vertex c itself
    std::vector<uint32_t> id(t.parent.size());
    id[0] = c;
    for (uint32_t v = 1; v < t.parent.size(); ++v) {
      id[v] = next++;
      edges.emplace_back(id[t.parent[v]], id[v]);
    }
    if (next > node_cap) throw std::runtime_error("tree node cap exceeded");
  }
  return graph_from_edges(next, edges, 0);
}

// GW(root_law, offspring)_L conditioned (by rejection) on reaching depth l,
// with an independent GWC(offspring; s)_{L-l} cycle attached at every depth-l
// vertex, preserving the existing subtrees.
inline HalfEdgeGraph egw(const DegreeDistribution& root_law, const DegreeDistribution& offspring,
                         uint32_t l, uint32_t s, uint32_t L, RandomStream& rng,
                         uint64_t node_cap = kDefaultNodeCap) {
  if (l > L) throw std::invalid_argument("egw: need l <= L");
  if (s < 2) throw std::invalid_argument("egw: cycle length >= 2 required");
  detail::TreeScaffold t;
  bool reached = false;
  for (int attempt = 0; attempt < kRejectionCap && !reached; ++attempt) {
    t = detail::grow_tree(offspring, root_law, L, rng, node_cap);
    reached = *std::max_element(t.depth.begin(), t.depth.end()) >= l;
  }
  if (!reached) throw std::runtime_error("survival conditioning infeasible");

  std::vector<std::pair<uint32_t, uint32_t>> edges;
  for (uint32_t v = 1; v < t.parent.size(); ++v) edges.emplace_back(t.parent[v], v);
  uint32_t next = uint32_t(t.parent.size());
  for (uint32_t v = 0; v < t.parent.size(); ++v) {
    if (t.depth[v] != l) continue;
    auto cyc = gwc(offspring, s, L - l, rng, node_cap);
    // cycle vertex 0 is v itself; the rest shift to fresh ids
    std::vector<uint32_t> id(cyc.n);
    id[0] = v;
    for (uint32_t w = 1; w < cyc.n; ++w) id[w] = next++;
    for (uint64_t h = 0; h < cyc.num_half_edges(); ++h) {
      uint64_t m = cyc.matching[h];
      if (h < m) edges.emplace_back(id[cyc.he_owner[h]], id[cyc.he_owner[m]]);
    }
    if (next > node_cap) throw std::runtime_error("tree node cap exceeded");
  }
  return graph_from_edges(next, edges, 0);
}

// G(n, p) with p = min(d/n, 1), by geometric skip sampling over the pair list
inline HalfEdgeGraph erdos_renyi(uint32_t n, double d, RandomStream& rng) {
  if (n < 2) throw std::invalid_argument("erdos_renyi: n >= 2 required");
  if (d < 0) throw std::invalid_argument("erdos_renyi: d >= 0 required");
  double p = std::min(d / double(n), 1.0);
  std::vector<std::pair<uint32_t, uint32_t>> edges;
  uint64_t num_pairs = uint64_t(n) * (n - 1) / 2;
  auto pair_at = [n](uint64_t idx) {
    // row i starts at off(i) = i*n - i(i+1)/2
    uint64_t lo = 0, hi = n - 1;
    while (lo < hi) {
      uint64_t mid = (lo + hi + 1) / 2;
      uint64_t off = mid * n - mid * (mid + 1) / 2;
      if (off <= idx)
        lo = mid;
      else
        hi = mid - 1;
    }
    uint64_t off = lo * n - lo * (lo + 1) / 2;
    return std::make_pair(uint32_t(lo), uint32_t(lo + 1 + (idx - off)));
  };
  if (p >= 1.0) {
    for (uint64_t t = 0; t < num_pairs; ++t) edges.push_back(pair_at(t));
  } else if (p > 0.0) {
    double log1mp = std::log1p(-p);
    uint64_t t = 0;
    while (true) {
      double u = rng.uniform_open();
      double skip = std::floor(std::log(u) / log1mp);
      if (skip >= double(num_pairs)) break;
      t += uint64_t(skip);
      if (t >= num_pairs) break;
      edges.push_back(pair_at(t));
      t += 1;
    }
  }
  return graph_from_edges(n, edges);
}

// subtree of a rooted graph hanging below v (v becomes the new root 0),
// following parent = the unique neighbor one level up
inline RootedTree extract_subtree(const RootedTree& t, uint32_t v) {
  const HalfEdgeGraph& g = t.g;
  if (g.depth.empty()) throw std::invalid_argument("extract_subtree: tree has no depth array");
  std::vector<uint32_t> id(g.n, kNoVertex);
  std::vector<uint32_t> order;
  id[v] = 0;
  order.push_back(v);
  std::vector<std::pair<uint32_t, uint32_t>> edges;
  for (size_t i = 0; i < order.size(); ++i) {
    uint32_t u = order[i];
    for (uint64_t h = g.he_begin(u); h < g.he_end(u); ++h) {
      uint32_t w = g.neighbor_via(h);
      if (g.depth[w] != g.depth[u] + 1) continue;
      if (id[w] != kNoVertex) continue;
      id[w] = uint32_t(order.size());
      order.push_back(w);
      edges.emplace_back(id[u], id[w]);
    }
  }
  RootedTree out;
  out.g = graph_from_edges(uint32_t(order.size()), edges, 0);
  out.rho = 0;
  // depth below the tree's own root, not below the anchor above it
  uint32_t rel = g.depth[v] - g.depth[t.rho];
  out.L = t.L > rel ? t.L - rel : 0;
  return out;
}

}  // namespace contagion
