#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>

#include "contagion/graph.hpp"

using namespace contagion;

static HalfEdgeGraph triangle() {
  return graph_from_edges(3, {{0, 1}, {1, 2}, {2, 0}});
}

TEST_CASE("edge-list construction and invariants") {
  auto g = triangle();
  g.validate();
  CHECK(g.n == 3);
  CHECK(g.num_edges() == 3);
  CHECK(g.degrees == std::vector<uint32_t>{2, 2, 2});

  SECTION("self-loop consumes two slots of one vertex") {
    auto h = graph_from_edges(2, {{0, 0}, {0, 1}});
    h.validate();
    CHECK(h.degrees == std::vector<uint32_t>{3, 1});
    CHECK(h.num_edges() == 2);
  }
  SECTION("parallel edges are distinct half-edge pairs") {
    auto h = graph_from_edges(2, {{0, 1}, {0, 1}});
    h.validate();
    CHECK(h.degrees == std::vector<uint32_t>{2, 2});
    CHECK(h.num_edges() == 2);
  }
}

TEST_CASE("depth computation") {
  auto g = graph_from_edges(5, {{0, 1}, {1, 2}, {2, 3}, {0, 4}}, 0);
  g.validate();
  CHECK(g.depth == std::vector<uint32_t>{0, 1, 2, 3, 1});

  auto h = graph_from_edges(3, {{0, 1}});  // vertex 2 isolated... needs n=3, zero-degree ok
  h.root = 0;
  h.compute_depths();
  CHECK(h.depth[2] == kUnreached);
}

TEST_CASE("neighborhood balls") {
  SECTION("radius zero is the vertex alone") {
    auto rep = neighborhood(triangle(), 1, 0);
    CHECK(rep.vertices == std::vector<uint32_t>{1});
    CHECK(rep.edge_count == 0);
    CHECK(rep.tree_excess == 0);
    CHECK(rep.boundary_half_edges.size() == 2);
  }
  SECTION("triangle at radius one has tree excess one") {
    auto rep = neighborhood(triangle(), 0, 1);
    CHECK(rep.vertices.size() == 3);
    CHECK(rep.edge_count == 3);
    CHECK(rep.tree_excess == 1);
    CHECK(rep.boundary_half_edges.empty());
  }
  SECTION("path ball counts boundary half-edges") {
    auto g = graph_from_edges(4, {{0, 1}, {1, 2}, {2, 3}});
    auto rep = neighborhood(g, 0, 1);
    CHECK(rep.vertices.size() == 2);
    CHECK(rep.edge_count == 1);
    CHECK(rep.tree_excess == 0);
    CHECK(rep.boundary_half_edges.size() == 1);
  }
}

TEST_CASE("validate rejects corrupted graphs") {
  auto g = triangle();
  SECTION("broken involution") {
    g.matching[0] = 0;
    CHECK_THROWS(g.validate());
  }
  SECTION("stale depths") {
    g.root = 0;
    g.compute_depths();
    g.depth[2] = 9;
    CHECK_THROWS(g.validate());
  }
}

TEST_CASE("text round trip") {
  auto g = graph_from_edges(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {1, 1}}, 2);
  const char* path = "test_graph_roundtrip.txt";
  write_text(g, path);
  auto h = read_text(path);
  h.validate();
  CHECK(h.n == g.n);
  CHECK(h.degrees == g.degrees);
  CHECK(h.num_edges() == g.num_edges());
  REQUIRE(h.root.has_value());
  CHECK(*h.root == 2);
  CHECK(h.depth == g.depth);
  std::remove(path);
}

TEST_CASE("binary round trip preserves the exact matching") {
  auto g = graph_from_edges(4, {{0, 1}, {1, 2}, {2, 3}, {0, 2}, {1, 1}});
  const char* path = "test_graph_roundtrip.bin";
  write_binary(g, path);
  CHECK(looks_binary(path));
  auto h = read_binary(path);
  h.validate();
  CHECK(h.matching == g.matching);
  CHECK(h.degrees == g.degrees);
  CHECK(h.hash() == g.hash());
  CHECK(load_graph(path).hash() == g.hash());
  std::remove(path);
}

TEST_CASE("hash distinguishes structures") {
  auto a = graph_from_edges(3, {{0, 1}, {1, 2}});
  auto b = graph_from_edges(3, {{0, 1}, {0, 2}});
  CHECK(a.hash() != b.hash());
  CHECK(a.hash() == graph_from_edges(3, {{0, 1}, {1, 2}}).hash());
}

TEST_CASE("missing header and bad magic are rejected") {
  const char* path = "test_graph_bad.txt";
  {
    std::ofstream out(path);
    out << "0 1\n";
  }
  CHECK_THROWS_WITH(read_text(path), Catch::Matchers::ContainsSubstring("n="));
  std::remove(path);

  {
    std::ofstream out(path, std::ios::binary);
    out << "NOTMAGIC and more";
  }
  CHECK_THROWS_WITH(read_binary(path), Catch::Matchers::ContainsSubstring("magic"));
  std::remove(path);
}
