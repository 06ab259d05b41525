#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <map>

#include "contagion/dynamics.hpp"
#include "contagion/graphgen.hpp"

using namespace contagion;

namespace {

RootedTree path_tree(uint32_t depth) {
  // 0 is the parent above the root; 1 is the root; unary chain below.
  std::vector<std::pair<uint32_t, uint32_t>> edges;
  for (uint32_t v = 0; v + 1 <= depth + 1; ++v) edges.emplace_back(v, v + 1);
  RootedTree t;
  t.g = graph_from_edges(depth + 2, edges, 0);
  t.rho = 1;
  t.rho_plus = 0;
  t.L = depth;
  return t;
}

// Apply both event logs in merged time order; after each distinct time,
// the first infected set must be contained in the second.
bool contained_throughout(const HalfEdgeGraph& g, const std::vector<uint32_t>& a0,
                          const std::vector<uint32_t>& b0, const Trajectory& ta,
                          const Trajectory& tb) {
  std::vector<char> a(g.n, 0), b(g.n, 0);
  for (uint32_t v : a0) a[v] = 1;
  for (uint32_t v : b0) b[v] = 1;
  auto subset = [&] {
    for (uint32_t v = 0; v < g.n; ++v)
      if (a[v] && !b[v]) return false;
    return true;
  };
  if (!subset()) return false;
  size_t i = 0, j = 0;
  while (i < ta.events.size() || j < tb.events.size()) {
    double t = std::numeric_limits<double>::infinity();
    if (i < ta.events.size()) t = std::min(t, ta.events[i].t);
    if (j < tb.events.size()) t = std::min(t, tb.events[j].t);
    while (i < ta.events.size() && ta.events[i].t == t) {
      a[ta.events[i].vertex] = ta.events[i].infected;
      ++i;
    }
    while (j < tb.events.size() && tb.events[j].t == t) {
      b[tb.events[j].vertex] = tb.events[j].infected;
      ++j;
    }
    if (!subset()) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("lone vertex dies at rate one") {
  auto g = graph_from_edges(1, {});
  auto s = survival_time(g, 1.0, {0}, 50.0, 100000, 21);
  CHECK(s.censored_fraction == 0.0);
  CHECK(std::abs(s.mean - 1.0) < 0.02);
  CHECK(std::abs(s.quantile(0.5) - std::log(2.0)) < 0.02);
}

TEST_CASE("empty start is already extinct") {
  auto g = graph_from_edges(3, {{0, 1}, {1, 2}});
  auto s = survival_time(g, 0.7, {}, 10.0, 50, 22);
  CHECK(s.mean == 0.0);
  CHECK(s.censored_fraction == 0.0);
}

TEST_CASE("suppressed-recovery excursion from the root has unit mean") {
  auto g = graph_from_edges(2, {{0, 1}}, 0);
  auto var = Variant::root_suppressed(0, 1);
  const uint32_t reps = 20000;
  RunningStat stat;
  for (uint32_t rep = 0; rep < reps; ++rep) {
    ClockStream clocks(derive_stream(23, "s0", rep), 0.7);
    auto t = simulate(g, var, {1}, 1e9, clocks);
    REQUIRE(!t.censored);
    stat.push(t.extinction_time);
  }
  CHECK(std::abs(stat.mean - 1.0) <= 4.0 * stat.sem());
}

TEST_CASE("dilated excursion mean scales as the inverse dilation base") {
  auto g = graph_from_edges(2, {{0, 1}}, 0);
  auto var = Variant::root_added(0).with_theta(0.4);
  const uint32_t reps = 20000;
  RunningStat stat;
  for (uint32_t rep = 0; rep < reps; ++rep) {
    ClockStream clocks(derive_stream(24, "theta0", rep), 0.7);
    auto t = simulate(g, var, {1}, 1e9, clocks);
    stat.push(t.extinction_time);
  }
  CHECK(std::abs(stat.mean - 2.5) <= 4.0 * stat.sem());
}

TEST_CASE("whole-graph survival is the max over singleton starts") {
  auto g = graph_from_edges(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
  for (int trial = 0; trial < 100; ++trial) {
    ClockStream clocks(derive_stream(25, "maxcoup", trial), 1.0);
    std::vector<Variant> variants(6, Variant::standard());
    std::vector<std::vector<uint32_t>> inits = {{0}, {1}, {2}, {3}, {4}, {0, 1, 2, 3, 4}};
    auto runs = simulate_coupled(g, variants, inits, 1e8, clocks);
    double tmax = 0.0;
    for (int v = 0; v < 5; ++v) {
      REQUIRE(!runs[v].censored);
      tmax = std::max(tmax, runs[v].extinction_time);
    }
    CHECK(runs[5].extinction_time == tmax);
  }
}

TEST_CASE("identical coupled runs are identical") {
  auto g = graph_from_edges(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  ClockStream clocks(derive_stream(26, "det"), 0.8);
  SimulateOptions opt;
  opt.record_events = true;
  auto runs = simulate_coupled(g, {Variant::standard(), Variant::standard()}, {{0, 2}, {0, 2}},
                               50.0, clocks, opt);
  REQUIRE(runs[0].events.size() == runs[1].events.size());
  CHECK(runs[0].extinction_time == runs[1].extinction_time);
  CHECK(runs[0].event_count == runs[1].event_count);
  for (size_t i = 0; i < runs[0].events.size(); ++i) {
    CHECK(runs[0].events[i].t == runs[1].events[i].t);
    CHECK(runs[0].events[i].vertex == runs[1].events[i].vertex);
  }
}

TEST_CASE("ignoring recoveries at one vertex dominates the standard run") {
  RandomStream gen(derive_stream(27, "lem22graph"));
  auto g = erdos_renyi(20, 2.0, gen);
  SimulateOptions opt;
  opt.record_events = true;
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    ClockStream clocks(derive_stream(27, "lem22", trial), 0.6);
    auto runs = simulate_coupled(g, {Variant::standard(), Variant::ignoring_recovery_at(0)},
                                 {{0, 3}, {0, 3}}, 10.0, clocks, opt);
    CHECK(contained_throughout(g, {0, 3}, {0, 3}, runs[0], runs[1]));
    ++checked;
  }
  CHECK(checked == 200);
}

TEST_CASE("monotonicity in the initial set under shared clocks") {
  int violations = 0;
  for (int inst = 0; inst < 10000; ++inst) {
    RandomStream gen(derive_stream(28, "monograph", inst));
    auto g = erdos_renyi(10, 1.5, gen);
    double lambda = 0.1 + gen.uniform();
    std::vector<uint32_t> a, b;
    for (uint32_t v = 0; v < g.n; ++v) {
      double u = gen.uniform();
      if (u < 0.2) a.push_back(v);
      if (u < 0.5) b.push_back(v);  // a is a subset of b by construction
    }
    ClockStream clocks(derive_stream(28, "monoclk", inst), lambda);
    SimulateOptions opt;
    opt.record_events = true;
    auto runs =
        simulate_coupled(g, {Variant::standard(), Variant::standard()}, {a, b}, 5.0, clocks, opt);
    if (!contained_throughout(g, a, b, runs[0], runs[1])) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("pair graph survival matches the hand-solved chain") {
  // Both ends of a single edge infected, unit infection rate: conditioning on
  // the first step gives E T = 2 exactly.
  auto g = graph_from_edges(2, {{0, 1}});
  auto s = survival_time(g, 1.0, {0, 1}, 1e6, 30000, 29);
  REQUIRE(s.censored_fraction == 0.0);
  RunningStat stat;
  for (double t : s.sorted_times) stat.push(t);
  CHECK(std::abs(s.mean - 2.0) <= 3.0 * stat.sem());
}

TEST_CASE("doubled edge transmits at doubled rate") {
  auto g = graph_from_edges(2, {{0, 1}, {0, 1}}, 0);
  auto var = Variant::root_added(0);
  const uint32_t reps = 20000;
  RunningStat first;
  SimulateOptions opt;
  opt.record_events = true;
  opt.stop_at_empty = false;
  for (uint32_t rep = 0; rep < reps; ++rep) {
    ClockStream clocks(derive_stream(30, "dbl", rep), 0.5);
    auto t = simulate(g, var, {}, 30.0, clocks, opt);
    REQUIRE(!t.events.empty());
    first.push(t.events[0].t);
  }
  // First infection of the far end is exponential at rate 2*lambda = 1.
  CHECK(std::abs(first.mean - 1.0) <= 4.0 * first.sem());
}

TEST_CASE("depth excursions") {
  SECTION("no transmission caps the depth at the root") {
    auto t = path_tree(3);
    auto tail = depth_excursion(t, 0.0, 2000, 31);
    CHECK(tail.tail[1] == 1.0);
    CHECK(tail.count_ge[2] == 0);
  }
  SECTION("one step down a unary path beats the root recovery") {
    auto t = path_tree(3);
    const double lambda = 0.01;
    const uint32_t reps = 100000;
    auto tail = depth_excursion(t, lambda, reps, 32);
    double p = lambda / (1.0 + lambda);
    double sigma = std::sqrt(p * (1.0 - p) / reps);
    CHECK(std::abs(tail.tail[2] - p) <= 3.0 * sigma);
  }
  SECTION("empty start never leaves depth zero") {
    auto g = graph_from_edges(2, {{0, 1}}, 0);
    ClockStream clocks(derive_stream(33, "r0"), 0.5);
    auto t = simulate(g, Variant::root_added(0), {}, 5.0, clocks);
    CHECK(t.max_depth == 0);
    CHECK(t.extinction_time == 0.0);
  }
  SECTION("geometric decay on a supercritical tree at small infection rate") {
    RandomStream gen(derive_stream(34, "gwtree"));
    auto tree = gw_tree(DegreeDistribution::poisson(2.0), DegreeDistribution::poisson(2.0), 12,
                        gen);
    auto tp = with_parent(tree);
    auto tail = depth_excursion(tp, 0.05, 30000, 35);
    CHECK(tail.slope < 0.0);
    CHECK(tail.fit_points >= 2);
    for (uint32_t h = 1; h + 1 < tail.count_ge.size(); ++h) {
      if (tail.count_ge[h + 1] < 100) break;
      INFO("h=" << h << " ratio " << tail.tail[h + 1] / tail.tail[h]);
      CHECK(tail.tail[h + 1] < tail.tail[h]);
    }
  }
}

TEST_CASE("dilated chain occupies the reweighted stationary law") {
  auto g = graph_from_edges(2, {{0, 1}}, 0);
  const double lambda = 0.5, theta = 0.5;
  auto var = Variant::root_added(0).with_theta(theta);
  double occ_empty = 0.0, total = 0.0;
  SimulateOptions opt;
  opt.stop_at_empty = false;
  opt.occupancy = [&](double t0, double t1, const InfectionState& st) {
    total += t1 - t0;
    if (st.infected_count == 1) occ_empty += t1 - t0;  // only the pinned vertex
  };
  ClockStream clocks(derive_stream(36, "nu"), lambda);
  simulate(g, var, {}, 30000.0, clocks, opt);
  CHECK(total == Catch::Approx(30000.0));
  CHECK(std::abs(occ_empty / total - 1.0 / (1.0 + lambda / theta)) < 0.02);
}

TEST_CASE("incremental depth bookkeeping survives a recount audit") {
  RootedTree tree;
  for (uint64_t salt = 0;; ++salt) {
    RandomStream gen(derive_stream(37, "audg", salt));
    tree = gw_tree(DegreeDistribution::poisson(2.0), DegreeDistribution::poisson(2.0), 6, gen);
    if (tree.g.n >= 50) break;
  }
  auto tp = with_parent(tree);
  SimulateOptions opt;
  opt.audit_every = 500;
  opt.stop_at_empty = false;
  ClockStream clocks(derive_stream(37, "audit"), 1.0);
  auto t = simulate(tp.g, Variant::root_added(0), {tp.rho}, 150.0, clocks, opt);
  CHECK(t.event_count > 10000);
}

TEST_CASE("engine guard rails") {
  auto g = graph_from_edges(2, {{0, 1}});
  ClockStream clocks(derive_stream(38, "guard"), 0.5);
  CHECK_THROWS(simulate(g, Variant::standard(), {0}, 0.0, clocks));
  CHECK_THROWS(simulate(g, Variant::standard().with_theta(0.5), {0}, 1.0, clocks));
  CHECK_THROWS(Variant::standard().with_theta(0.0));
  CHECK_THROWS(Variant::standard().with_theta(1.5));
  CHECK_THROWS(simulate_coupled(g, {Variant::standard()}, {{0}, {1}}, 1.0, clocks));
}

TEST_CASE("censoring is explicit and quantiles respect it") {
  auto g = graph_from_edges(1, {});
  const uint32_t reps = 20000;
  auto s = survival_time(g, 1.0, {0}, 0.5, reps, 39);
  double cf = std::exp(-0.5);
  CHECK(std::abs(s.censored_fraction - cf) < 4.0 * std::sqrt(cf * (1 - cf) / reps));
  CHECK(s.median_censored);
  CHECK(s.median == 0.5);
  CHECK(s.quantile_valid(0.25));
  CHECK(!s.quantile_valid(0.45));
  CHECK(std::abs(s.quantile(0.25) - (-std::log(0.75))) < 0.02);
}

TEST_CASE("trajectories truncate consistently across horizons") {
  auto g = graph_from_edges(4, {{0, 1}, {1, 2}, {2, 3}});
  SimulateOptions opt;
  opt.record_events = true;
  ClockStream clocks(derive_stream(40, "prefix"), 0.9);
  auto a = simulate(g, Variant::standard(), {0, 1}, 2.0, clocks, opt);
  auto b = simulate(g, Variant::standard(), {0, 1}, 50.0, clocks, opt);
  for (size_t i = 0; i < a.events.size(); ++i) {
    REQUIRE(i < b.events.size());
    CHECK(a.events[i].t == b.events[i].t);
    CHECK(a.events[i].vertex == b.events[i].vertex);
  }
}
