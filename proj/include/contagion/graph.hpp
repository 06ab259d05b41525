#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <deque>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "contagion/rng.hpp"

namespace contagion {

constexpr uint32_t kNoVertex = std::numeric_limits<uint32_t>::max();
constexpr uint32_t kUnreached = std::numeric_limits<uint32_t>::max();

// Multigraph as half-edges: vertex v owns the half-edge ids in
// [he_offset[v], he_offset[v+1]), and `matching` is a fixed-point-free
// involution pairing them into edges. Loops and parallel edges are legal.
struct HalfEdgeGraph {
  uint32_t n = 0;
  std::vector<uint32_t> degrees;
  std::vector<uint64_t> he_offset;  // size n+1
  std::vector<uint64_t> matching;   // size sum(degrees)
  std::vector<uint32_t> he_owner;   // derived
  std::optional<uint32_t> root;
  std::vector<uint32_t> depth;  // BFS distance from root; kUnreached if not

  uint64_t num_half_edges() const { return matching.size(); }
  uint64_t num_edges() const { return matching.size() / 2; }
  uint32_t owner(uint64_t he) const { return he_owner[he]; }
  uint32_t neighbor_via(uint64_t he) const { return he_owner[matching[he]]; }
  uint64_t he_begin(uint32_t v) const { return he_offset[v]; }
  uint64_t he_end(uint32_t v) const { return he_offset[v + 1]; }

  void build_owner_map() {
    he_owner.assign(matching.size(), kNoVertex);
    for (uint32_t v = 0; v < n; ++v)
      for (uint64_t h = he_offset[v]; h < he_offset[v + 1]; ++h) he_owner[h] = v;
  }

  void compute_depths() {
    depth.assign(n, kUnreached);
    if (!root) return;
    std::deque<uint32_t> q;
    depth[*root] = 0;
    q.push_back(*root);
    while (!q.empty()) {
      uint32_t v = q.front();
      q.pop_front();
      for (uint64_t h = he_begin(v); h < he_end(v); ++h) {
        uint32_t u = neighbor_via(h);
        if (depth[u] == kUnreached) {
          depth[u] = depth[v] + 1;
          q.push_back(u);
        }
      }
    }
  }

  void validate() const {
    if (degrees.size() != n || he_offset.size() != size_t(n) + 1)
      throw std::runtime_error("graph: size fields inconsistent");
    uint64_t total = 0;
    for (uint32_t v = 0; v < n; ++v) {
      if (he_offset[v] != total) throw std::runtime_error("graph: offsets not prefix sums");
      total += degrees[v];
    }
    if (he_offset[n] != total || matching.size() != total)
      throw std::runtime_error("graph: half-edge count mismatch");
    if (total % 2 != 0) throw std::runtime_error("graph: odd half-edge total");
    for (uint64_t h = 0; h < total; ++h) {
      if (matching[h] >= total) throw std::runtime_error("graph: matching out of range");
      if (matching[h] == h) throw std::runtime_error("graph: matching has a fixed point");
      if (matching[matching[h]] != h) throw std::runtime_error("graph: matching not an involution");
    }
    if (he_owner.size() != total) throw std::runtime_error("graph: owner map missing");
    for (uint32_t v = 0; v < n; ++v)
      for (uint64_t h = he_offset[v]; h < he_offset[v + 1]; ++h)
        if (he_owner[h] != v) throw std::runtime_error("graph: owner map wrong");
    if (root) {
      if (*root >= n) throw std::runtime_error("graph: root out of range");
      HalfEdgeGraph copy = *this;
      copy.compute_depths();
      if (copy.depth != depth) throw std::runtime_error("graph: stale depth array");
    }
  }

  uint64_t hash() const {
    uint64_t h = 0xCBF29CE484222325ull;
    auto mix = [&h](const void* data, size_t len) {
      const unsigned char* p = static_cast<const unsigned char*>(data);
      for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001B3ull;
      }
    };
    uint64_t n64 = n;
    mix(&n64, 8);
    for (uint32_t d : degrees) {
      uint64_t d64 = d;
      mix(&d64, 8);
    }
    for (uint64_t m : matching) mix(&m, 8);
    return h;
  }
};

inline HalfEdgeGraph graph_from_edges(uint32_t n,
                                      const std::vector<std::pair<uint32_t, uint32_t>>& edges,
                                      std::optional<uint32_t> root = std::nullopt) {
  HalfEdgeGraph g;
  g.n = n;
  g.degrees.assign(n, 0);
  for (auto [u, v] : edges) {
    if (u >= n || v >= n) throw std::invalid_argument("edge endpoint out of range");
    g.degrees[u]++;
    g.degrees[v]++;
  }
  g.he_offset.assign(size_t(n) + 1, 0);
  for (uint32_t v = 0; v < n; ++v) g.he_offset[v + 1] = g.he_offset[v] + g.degrees[v];
  g.matching.assign(g.he_offset[n], 0);
  std::vector<uint64_t> cursor(g.he_offset.begin(), g.he_offset.end() - 1);
  for (auto [u, v] : edges) {
    uint64_t hu = cursor[u]++;
    uint64_t hv = cursor[v]++;
    g.matching[hu] = hv;
    g.matching[hv] = hu;
  }
  g.build_owner_map();
  g.root = root;
  g.compute_depths();
  return g;
}

// Acyclic rooted specialization. rho_plus, when present, is a permanently
// pinned parent attached above rho; by convention the anchor (rho_plus if
// present, else rho) is vertex 0 and equals g.root.
struct RootedTree {
  HalfEdgeGraph g;
  uint32_t rho = 0;
  std::optional<uint32_t> rho_plus;
  uint32_t L = 0;
};

struct NeighborhoodReport {
  std::vector<uint32_t> vertices;  // BFS order
  std::vector<uint32_t> dist;      // parallel to vertices
  uint64_t edge_count = 0;         // induced edges (loops included)
  int64_t tree_excess = 0;         // edges - vertices + 1
  std::vector<uint64_t> boundary_half_edges;
};

inline NeighborhoodReport neighborhood(const HalfEdgeGraph& g, uint32_t v, uint32_t r) {
  if (v >= g.n) throw std::invalid_argument("neighborhood: vertex out of range");
  NeighborhoodReport rep;
  std::vector<uint32_t> dist(g.n, kUnreached);
  dist[v] = 0;
  rep.vertices.push_back(v);
  rep.dist.push_back(0);
  for (size_t i = 0; i < rep.vertices.size(); ++i) {
    uint32_t u = rep.vertices[i];
    if (rep.dist[i] == r) continue;
    for (uint64_t h = g.he_begin(u); h < g.he_end(u); ++h) {
      uint32_t w = g.neighbor_via(h);
      if (dist[w] == kUnreached) {
        dist[w] = dist[u] + 1;
        rep.vertices.push_back(w);
        rep.dist.push_back(dist[w]);
      }
    }
  }
  for (uint32_t u : rep.vertices) {
    for (uint64_t h = g.he_begin(u); h < g.he_end(u); ++h) {
      uint64_t m = g.matching[h];
      uint32_t w = g.he_owner[m];
      if (dist[w] == kUnreached)
        rep.boundary_half_edges.push_back(h);
      else if (h < m)
        rep.edge_count++;
    }
  }
  rep.tree_excess = int64_t(rep.edge_count) - int64_t(rep.vertices.size()) + 1;
  return rep;
}

// ---- serialization ----

inline void write_text(const HalfEdgeGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "# n=" << g.n << '\n';
  if (g.root) out << "# root=" << *g.root << '\n';
  for (uint64_t h = 0; h < g.num_half_edges(); ++h) {
    uint64_t m = g.matching[h];
    if (h < m) {
      uint32_t u = g.he_owner[h], v = g.he_owner[m];
      if (u > v) std::swap(u, v);
      out << u << ' ' << v << '\n';
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline HalfEdgeGraph read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  uint64_t n = 0;
  bool have_n = false;
  std::optional<uint32_t> root;
  std::vector<std::pair<uint32_t, uint32_t>> edges;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      auto grab = [&](const char* key) -> std::optional<uint64_t> {
        size_t pos = line.find(key);
        if (pos == std::string::npos) return std::nullopt;
        return std::stoull(line.substr(pos + std::strlen(key)));
      };
      if (auto v = grab("n=")) {
        n = *v;
        have_n = true;
      }
      if (auto v = grab("root=")) root = uint32_t(*v);
      continue;
    }
    std::istringstream ss(line);
    uint64_t u, v;
    if (!(ss >> u >> v))
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad edge line");
    edges.emplace_back(uint32_t(u), uint32_t(v));
  }
  if (!have_n) throw std::runtime_error(path + ": missing '# n=' header");
  return graph_from_edges(uint32_t(n), edges, root);
}

constexpr char kBinaryMagic[8] = {'C', 'N', 'T', 'G', 'R', 'P', 'H', '1'};

inline void write_binary(const HalfEdgeGraph& g, const std::string& path) {
  static_assert(std::endian::native == std::endian::little, "little-endian host required");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.write(kBinaryMagic, 8);
  uint64_t n64 = g.n;
  out.write(reinterpret_cast<const char*>(&n64), 8);
  for (uint32_t v = 0; v < g.n; ++v) {
    uint64_t d = g.degrees[v];
    out.write(reinterpret_cast<const char*>(&d), 8);
  }
  for (uint64_t m : g.matching) out.write(reinterpret_cast<const char*>(&m), 8);
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline HalfEdgeGraph read_binary(const std::string& path) {
  static_assert(std::endian::native == std::endian::little, "little-endian host required");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kBinaryMagic, 8) != 0)
    throw std::runtime_error(path + ": bad magic");
  uint64_t n64 = 0;
  in.read(reinterpret_cast<char*>(&n64), 8);
  HalfEdgeGraph g;
  g.n = uint32_t(n64);
  g.degrees.resize(g.n);
  g.he_offset.assign(size_t(g.n) + 1, 0);
  for (uint32_t v = 0; v < g.n; ++v) {
    uint64_t d = 0;
    in.read(reinterpret_cast<char*>(&d), 8);
    g.degrees[v] = uint32_t(d);
    g.he_offset[v + 1] = g.he_offset[v] + d;
  }
  g.matching.resize(g.he_offset[g.n]);
  for (auto& m : g.matching) in.read(reinterpret_cast<char*>(&m), 8);
  if (!in) throw std::runtime_error(path + ": truncated");
  g.build_owner_map();
  return g;
}

inline bool looks_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  char magic[8] = {};
  in.read(magic, 8);
  return in && std::memcmp(magic, kBinaryMagic, 8) == 0;
}

inline HalfEdgeGraph load_graph(const std::string& path) {
  return looks_binary(path) ? read_binary(path) : read_text(path);
}

}  // namespace contagion
