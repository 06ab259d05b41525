#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "contagion/graphgen.hpp"
#include "contagion/stats.hpp"

using namespace contagion;

namespace {

// Canonical encoding of a matching: sorted list of sorted half-edge pairs.
std::string matching_key(const HalfEdgeGraph& g) {
  std::vector<std::pair<uint32_t, uint32_t>> pairs;
  for (uint32_t h = 0; h < g.num_half_edges(); ++h)
    if (h < g.matching[h]) pairs.emplace_back(h, g.matching[h]);
  std::sort(pairs.begin(), pairs.end());
  std::string key;
  for (auto [a, b] : pairs) key += std::to_string(a) + "-" + std::to_string(b) + ";";
  return key;
}

uint32_t max_depth(const RootedTree& t) {
  uint32_t m = 0;
  for (uint32_t d : t.g.depth)
    if (d != kUnreached) m = std::max(m, d);
  return m;
}

}  // namespace

TEST_CASE("configuration model on fixed degrees") {
  RandomStream rng(derive_stream(11, "cfg-fixed"));
  SECTION("two vertices of degree one form the unique edge") {
    auto g = configuration_model(2, DegreeDistribution::point(1), rng);
    g.validate();
    CHECK(g.num_edges() == 1);
    CHECK(g.neighbor_via(g.he_begin(0)) == 1);
  }
  SECTION("three vertices of degree two give three edges") {
    auto g = configuration_model(3, DegreeDistribution::point(2), rng);
    g.validate();
    CHECK(g.n == 3);
    CHECK(g.num_edges() == 3);
  }
}

TEST_CASE("configuration model degree marginals") {
  RandomStream rng(derive_stream(11, "cfg-pois"));
  auto mu = DegreeDistribution::poisson(3.0);
  const uint32_t n = 10000;
  auto g = configuration_model(n, mu, rng);
  g.validate();

  // Bin the empirical degrees, folding the sparse tail into one bin.
  uint32_t cut = 10;
  std::vector<uint64_t> observed(cut + 1, 0);
  std::vector<double> expected(cut + 1, 0.0);
  for (uint32_t v = 0; v < n; ++v) observed[std::min(g.degrees[v], cut)] += 1;
  for (uint32_t k = 0; k <= mu.kmax(); ++k) expected[std::min(k, cut)] += n * mu.pmf(k);

  auto res = chi2_gof(observed, expected, 1e-3);
  INFO("chi2=" << res.statistic << " dof=" << res.dof << " p=" << res.pvalue);
  CHECK(res.pass);
}

TEST_CASE("cutoff line matching, two half-edges") {
  RandomStream rng(derive_stream(11, "cut2"));
  auto res = cutoff_line_match({1, 1}, rng);
  res.g.validate();
  CHECK(res.g.num_edges() == 1);
  REQUIRE(res.trace.size() == 1);
  // The final line sits at the partner's height: both half-edge heights
  // are on the trace, and the line equals the non-selected one.
  CHECK(res.final_line == res.trace[0].line);
  CHECK(res.final_line > 0.0);
  CHECK(res.final_line < 1.0);
}

TEST_CASE("cutoff matching is uniform on degrees (2,1,1)") {
  std::map<std::string, int> freq;
  const int reps = 30000;
  for (int i = 0; i < reps; ++i) {
    RandomStream rng(derive_stream(12, "cut211", i));
    auto res = cutoff_line_match({2, 1, 1}, rng);
    res.g.validate();
    freq[matching_key(res.g)] += 1;
  }
  REQUIRE(freq.size() == 3);
  for (auto& [key, count] : freq) {
    INFO(key << " -> " << count);
    CHECK(std::abs(count / double(reps) - 1.0 / 3.0) < 0.01);
  }
}

TEST_CASE("cutoff matching agrees with uniform matching on degrees (2,2,2)") {
  std::map<std::string, double> fa, fb;
  // The plug-in TV estimate between two identical 15-cell distributions has
  // expectation ~0.021 at 1e4 samples; 4e4 brings the floor to ~0.010.
  const int reps = 40000;
  for (int i = 0; i < reps; ++i) {
    RandomStream r1(derive_stream(13, "cutdist", i));
    RandomStream r2(derive_stream(14, "unidist", i));
    fa[matching_key(cutoff_line_match({2, 2, 2}, r1).g)] += 1.0 / reps;
    fb[matching_key(from_degrees_uniform_matching({2, 2, 2}, r2))] += 1.0 / reps;
  }
  double tv = 0.0;
  for (auto& [key, p] : fa) tv += std::abs(p - fb[key]);
  for (auto& [key, p] : fb)
    if (!fa.count(key)) tv += p;
  tv /= 2.0;
  INFO("support a=" << fa.size() << " b=" << fb.size() << " tv=" << tv);
  CHECK(tv < 0.02);
}

TEST_CASE("cutoff selection hook overrides the default order") {
  RandomStream rng(derive_stream(11, "cuthook"));
  // Always pick the lowest-index unmatched half-edge instead of lowest height.
  CutoffSelection first_free = [](const std::vector<char>& matched) {
    for (uint64_t h = 0; h < matched.size(); ++h)
      if (!matched[h]) return h;
    return uint64_t{0};
  };
  auto res = cutoff_line_match({2, 2}, rng, first_free);
  res.g.validate();
  CHECK(res.trace[0].selected == 0);
  CHECK(res.trace.size() == 2);
}

TEST_CASE("galton-watson trees") {
  SECTION("depth zero is a single vertex") {
    RandomStream rng(derive_stream(11, "gw0"));
    auto t = gw_tree(DegreeDistribution::poisson(2.0), DegreeDistribution::poisson(2.0), 0, rng);
    t.g.validate();
    CHECK(t.g.n == 1);
    CHECK(t.g.num_edges() == 0);
    CHECK(t.rho == 0);
  }
  SECTION("deterministic binary tree to depth three") {
    RandomStream rng(derive_stream(11, "gwbin"));
    auto t = gw_tree(DegreeDistribution::point(2), DegreeDistribution::point(2), 3, rng);
    t.g.validate();
    CHECK(t.g.n == 15);
    CHECK(t.g.num_edges() == 14);
    CHECK(max_depth(t) == 3);
  }
  SECTION("generation sizes have the branching mean") {
    const int reps = 10000;
    std::vector<RunningStat> gen(6);
    for (int i = 0; i < reps; ++i) {
      RandomStream rng(derive_stream(15, "gwmean", i));
      auto t = gw_tree(DegreeDistribution::poisson(2.0), DegreeDistribution::poisson(2.0), 5, rng);
      std::vector<double> sizes(6, 0.0);
      for (uint32_t d : t.g.depth) sizes[d] += 1.0;
      for (int s = 0; s <= 5; ++s) gen[s].push(sizes[s]);
    }
    for (int s = 0; s <= 5; ++s) {
      INFO("generation " << s << " mean " << gen[s].mean);
      CHECK(std::abs(gen[s].mean - std::pow(2.0, s)) <= 4.0 * gen[s].sem());
    }
  }
  SECTION("survival to depth five matches the fixed-point iteration") {
    // q_{t+1} = exp(2 (q_t - 1)) starting from q_0 = 0.
    double q = 0.0;
    for (int t = 0; t < 5; ++t) q = std::exp(2.0 * (q - 1.0));
    const int reps = 10000;
    int reached = 0;
    for (int i = 0; i < reps; ++i) {
      RandomStream rng(derive_stream(16, "gwsurv", i));
      auto t = gw_tree(DegreeDistribution::poisson(2.0), DegreeDistribution::poisson(2.0), 5, rng);
      if (max_depth(t) == 5) ++reached;
    }
    double frac = reached / double(reps);
    double band = 4.0 * std::sqrt(q * (1.0 - q) / reps);
    INFO("survival " << frac << " target " << 1.0 - q);
    CHECK(std::abs(frac - (1.0 - q)) < band);
  }
}

TEST_CASE("adding a parent above the root") {
  RandomStream rng(derive_stream(11, "gwpar"));
  auto t = gw_tree(DegreeDistribution::point(2), DegreeDistribution::point(2), 2, rng);
  auto tp = with_parent(t);
  tp.g.validate();
  CHECK(tp.g.n == t.g.n + 1);
  REQUIRE(tp.rho_plus.has_value());
  CHECK(*tp.rho_plus == 0);
  CHECK(tp.rho == 1);
  CHECK(tp.g.degrees[0] == 1);
  CHECK(tp.g.depth[tp.rho] == 1);
  CHECK_THROWS(with_parent(tp));
}

TEST_CASE("cycle-rooted trees") {
  SECTION("bare triangle") {
    RandomStream rng(derive_stream(11, "gwc3"));
    auto g = gwc(DegreeDistribution::point(0), 3, 2, rng);
    g.validate();
    CHECK(g.n == 3);
    CHECK(g.num_edges() == 3);
    CHECK(g.degrees == std::vector<uint32_t>{2, 2, 2});
  }
  SECTION("two-cycle is a doubled edge") {
    RandomStream rng(derive_stream(11, "gwc2"));
    auto g = gwc(DegreeDistribution::point(0), 2, 2, rng);
    g.validate();
    CHECK(g.n == 2);
    CHECK(g.num_edges() == 2);
    CHECK(g.degrees == std::vector<uint32_t>{2, 2});
  }
  SECTION("unary chains below a square") {
    RandomStream rng(derive_stream(11, "gwc4"));
    auto g = gwc(DegreeDistribution::point(1), 4, 2, rng);
    g.validate();
    // 4 cycle vertices; each of the 3 non-root ones hangs a chain of 2.
    CHECK(g.n == 10);
    CHECK(g.num_edges() == 10);
    auto rep = neighborhood(g, 0, 12);
    CHECK(rep.tree_excess == 1);
  }
}

TEST_CASE("depth-conditioned trees with cycle attachments") {
  SECTION("conditioning at depth zero attaches one cycle at the root") {
    RandomStream rng(derive_stream(11, "egw0"));
    auto g = egw(DegreeDistribution::point(0), DegreeDistribution::point(0), 0, 3, 4, rng);
    g.validate();
    CHECK(g.n == 3);
    CHECK(g.num_edges() == 3);
    REQUIRE(g.root.has_value());
    CHECK(g.depth[*g.root] == 0);
  }
  SECTION("deterministic unary skeleton") {
    RandomStream rng(derive_stream(11, "egwu"));
    auto g = egw(DegreeDistribution::point(1), DegreeDistribution::point(1), 2, 3, 4, rng);
    g.validate();
    // Unary path to depth 4 (5 vertices); its depth-2 vertex carries a
    // triangle whose two new vertices each hang a chain of length 2.
    CHECK(g.n == 11);
    CHECK(g.num_edges() == 11);
    auto rep = neighborhood(g, *g.root, 32);
    CHECK(rep.vertices.size() == 11);
    CHECK(rep.tree_excess == 1);
  }
  SECTION("one independent cycle per depth-l vertex") {
    for (int i = 0; i < 20; ++i) {
      RandomStream rng(derive_stream(17, "egwc", i));
      auto g = egw(DegreeDistribution::poisson(2.0), DegreeDistribution::poisson(2.0), 2, 3, 3,
                   rng);
      g.validate();
      uint32_t at_l = 0;
      // Each depth-l attachment contributes exactly one independent cycle,
      // and cycle vertices land strictly below depth l.
      auto rep = neighborhood(g, *g.root, 64);
      REQUIRE(rep.vertices.size() == g.n);
      for (uint32_t v = 0; v < g.n; ++v)
        if (g.depth[v] == 2) ++at_l;
      CHECK(at_l >= 1);
      CHECK(rep.tree_excess == at_l);
    }
  }
}

TEST_CASE("erdos-renyi sampler") {
  SECTION("density one gives the complete graph") {
    RandomStream rng(derive_stream(11, "erfull"));
    auto g = erdos_renyi(5, 5.0, rng);
    g.validate();
    CHECK(g.num_edges() == 10);
  }
  SECTION("density zero gives the empty graph") {
    RandomStream rng(derive_stream(11, "erempty"));
    auto g = erdos_renyi(5, 0.0, rng);
    g.validate();
    CHECK(g.num_edges() == 0);
  }
  SECTION("edge count concentrates") {
    RandomStream rng(derive_stream(11, "ercount"));
    const uint32_t n = 1000;
    auto g = erdos_renyi(n, 3.0, rng);
    g.validate();
    double mean = 3.0 * (n - 1) / 2.0;
    double sd = std::sqrt(mean * (1.0 - 3.0 / n));
    INFO("edges " << g.num_edges() << " mean " << mean);
    CHECK(std::abs(g.num_edges() - mean) < 4.0 * sd);
    for (uint32_t h = 0; h < g.num_half_edges(); ++h)
      CHECK(g.neighbor_via(h) != g.owner(h));
  }
}

TEST_CASE("local tree-likeness of sparse configuration graphs") {
  // Radius grows like a small multiple of log n, slow enough that balls stay
  // well below sqrt(n) and multi-collision probability vanishes.
  auto excess_fraction = [](uint32_t n, uint64_t salt) {
    RandomStream rng(derive_stream(18, "treelike", salt));
    auto g = configuration_model(n, DegreeDistribution::poisson(3.0), rng);
    uint32_t r = uint32_t(std::floor(0.29 * std::log(double(n))));
    int bad = 0;
    const uint32_t probes = 1000;
    for (uint32_t i = 0; i < probes; ++i) {
      uint32_t v = uint32_t(rng.uniform_int(n));
      if (neighborhood(g, v, r).tree_excess >= 2) ++bad;
    }
    return bad / double(probes);
  };
  double f3 = excess_fraction(1000, 1);
  double f4 = excess_fraction(10000, 2);
  INFO("n=1e3 " << f3 << "  n=1e4 " << f4);
  CHECK(f4 < 0.01);
  CHECK(f4 <= f3);
}

TEST_CASE("subtree extraction") {
  RandomStream rng(derive_stream(11, "subtree"));
  auto t = gw_tree(DegreeDistribution::point(2), DegreeDistribution::point(2), 3, rng);
  // Pick a depth-1 vertex; its subtree is the complete binary tree of depth 2.
  uint32_t v = kNoVertex;
  for (uint32_t u = 0; u < t.g.n; ++u)
    if (t.g.depth[u] == 1) {
      v = u;
      break;
    }
  REQUIRE(v != kNoVertex);
  auto s = extract_subtree(t, v);
  s.g.validate();
  CHECK(s.g.n == 7);
  CHECK(s.rho == 0);
  CHECK(s.L == 2);
  CHECK(max_depth(s) == 2);
}

TEST_CASE("generator guard rails") {
  RandomStream rng(derive_stream(11, "guards"));
  CHECK_THROWS_WITH(gw_tree(DegreeDistribution::point(3), DegreeDistribution::point(3), 20, rng,
                            1000),
                    Catch::Matchers::ContainsSubstring("cap"));
  CHECK_THROWS(gwc(DegreeDistribution::point(0), 1, 0, rng));
}
