#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "contagion/graph.hpp"

namespace contagion {

inline std::string json_num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

// Insertion-ordered object/array builders so identical runs serialize to
// identical bytes; floats always carry 17 significant digits.
class JsonObj {
 public:
  JsonObj& add(const std::string& k, const std::string& v) {
    return raw(k, "\"" + json_escape(v) + "\"");
  }
  JsonObj& add(const std::string& k, const char* v) { return add(k, std::string(v)); }
  JsonObj& add(const std::string& k, double v) { return raw(k, json_num(v)); }
  JsonObj& add(const std::string& k, bool v) { return raw(k, v ? "true" : "false"); }
  JsonObj& add(const std::string& k, uint64_t v) { return raw(k, std::to_string(v)); }
  JsonObj& add(const std::string& k, uint32_t v) { return raw(k, std::to_string(v)); }
  JsonObj& add(const std::string& k, int v) { return raw(k, std::to_string(v)); }
  JsonObj& raw(const std::string& k, const std::string& rendered) {
    if (!body_.empty()) body_ += ",";
    body_ += "\"" + json_escape(k) + "\":" + rendered;
    return *this;
  }
  std::string str() const { return "{" + body_ + "}"; }

 private:
  std::string body_;
};

class JsonArr {
 public:
  JsonArr& add(double v) { return raw(json_num(v)); }
  JsonArr& add(uint64_t v) { return raw(std::to_string(v)); }
  JsonArr& add(const std::string& v) { return raw("\"" + json_escape(v) + "\""); }
  JsonArr& raw(const std::string& rendered) {
    if (!body_.empty()) body_ += ",";
    body_ += rendered;
    return *this;
  }
  std::string str() const { return "[" + body_ + "]"; }

 private:
  std::string body_;
};

// ---------------------------------------------------------------------------
// Graph files

struct GraphFile {
  HalfEdgeGraph g;
  std::optional<uint32_t> root;
  std::optional<uint32_t> root_parent;
  std::optional<uint32_t> depth;
};

inline std::vector<std::pair<uint32_t, uint32_t>> canonical_edges(const HalfEdgeGraph& g) {
  std::vector<std::pair<uint32_t, uint32_t>> edges;
  for (uint64_t h = 0; h < g.num_half_edges(); ++h) {
    uint64_t m = g.matching[h];
    if (h < m) {
      uint32_t u = g.owner(h), v = g.owner(m);
      edges.emplace_back(std::min(u, v), std::max(u, v));
    }
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

// The stored hash is taken after a rebuild from the canonical edge list, so
// it matches what any later load reconstructs.
inline std::string render_graph(const GraphFile& gf, std::string* hash_out = nullptr) {
  auto edges = canonical_edges(gf.g);
  HalfEdgeGraph rebuilt = graph_from_edges(gf.g.n, edges, gf.root);
  JsonObj o;
  o.add("format", "contagion-graph-v1");
  o.add("n", uint64_t(gf.g.n));
  o.add("edge_count", uint64_t(edges.size()));
  if (gf.root) o.add("root", uint64_t(*gf.root));
  if (gf.root_parent) o.add("root_parent", uint64_t(*gf.root_parent));
  if (gf.depth) o.add("depth", uint64_t(*gf.depth));
  JsonArr arr;
  for (auto [u, v] : edges) arr.raw("[" + std::to_string(u) + "," + std::to_string(v) + "]");
  o.raw("edges", arr.str());
  std::string hash = std::to_string(rebuilt.hash());
  o.add("hash", hash);
  if (hash_out) *hash_out = hash;
  return o.str();
}

inline std::string save_graph(const GraphFile& gf, const std::string& path) {
  std::string hash;
  std::string body = render_graph(gf, &hash);
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << body << "\n";
  if (!f) throw std::runtime_error("write failed: " + path);
  return hash;
}

inline GraphFile load_graph_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open graph file: " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("bad graph file " + path + ": " + e.what());
  }
  if (j.value("format", "") != std::string("contagion-graph-v1"))
    throw std::runtime_error("unrecognized graph file format in " + path);
  GraphFile gf;
  uint32_t n = j.at("n").get<uint32_t>();
  std::vector<std::pair<uint32_t, uint32_t>> edges;
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 2) throw std::runtime_error("bad edge entry in " + path);
    uint32_t u = e[0].get<uint32_t>(), v = e[1].get<uint32_t>();
    if (u >= n || v >= n) throw std::runtime_error("edge endpoint out of range in " + path);
    edges.emplace_back(u, v);
  }
  if (j.contains("root")) gf.root = j["root"].get<uint32_t>();
  if (j.contains("root_parent")) gf.root_parent = j["root_parent"].get<uint32_t>();
  if (j.contains("depth")) gf.depth = j["depth"].get<uint32_t>();
  gf.g = graph_from_edges(n, edges, gf.root);
  if (j.contains("hash")) {
    std::string stored = j["hash"].get<std::string>();
    if (stored != std::to_string(gf.g.hash()))
      throw std::runtime_error("graph file hash mismatch in " + path);
  }
  return gf;
}

inline RootedTree tree_instance(const GraphFile& gf) {
  if (!gf.root || !gf.root_parent)
    throw std::runtime_error("instance needs root and root_parent fields");
  RootedTree t;
  t.g = gf.g;
  t.rho = *gf.root;
  t.rho_plus = *gf.root_parent;
  t.L = gf.depth.value_or(0);
  return t;
}

inline nlohmann::json parse_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open file: " + path);
  try {
    nlohmann::json j;
    f >> j;
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("bad JSON in " + path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << body;
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace contagion
