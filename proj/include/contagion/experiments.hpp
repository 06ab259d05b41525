#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "contagion/dynamics.hpp"
#include "contagion/graphgen.hpp"
#include "contagion/stats.hpp"

namespace contagion {

// ---------------------------------------------------------------------------
// Rate coupling by thinning

// Presents the subset of a base stream's infection arrivals accepted with
// probability `accept`, at their original times, so a slower process is
// pathwise contained in the faster one driven by the base stream.
struct ThinnedClockStream {
  ClockStream base;
  double accept;
  mutable std::vector<uint64_t> scan;
  mutable std::vector<double> last_time;
  mutable std::vector<uint64_t> served;

  ThinnedClockStream(const ClockStream& b, double a, uint64_t half_edges)
      : base(b), accept(a), scan(half_edges, 0), last_time(half_edges, 0.0),
        served(half_edges, 0) {
    if (!(accept > 0.0 && accept <= 1.0))
      throw std::invalid_argument("acceptance probability must be in (0,1]");
  }

  double recovery_gap(uint32_t v, uint64_t i) const { return base.recovery_gap(v, i); }

  double infection_gap(uint64_t he, uint64_t i) const {
    if (i != served[he]) throw std::logic_error("thinned stream must be read sequentially");
    double start = last_time[he];
    double t = start;
    for (;;) {
      t += base.infection_gap(he, scan[he]);
      double u = base.thinning_u(he, scan[he]);
      ++scan[he];
      if (u < accept) break;
    }
    last_time[he] = t;
    ++served[he];
    return t - start;
  }
};

// One coupled trial: the faster rate uses the base stream, the slower one
// its thinned subset. Returns (survival at lambda_lo, survival at lambda_hi).
inline std::pair<double, double> coupled_rate_survival(const HalfEdgeGraph& g, double lambda_lo,
                                                       double lambda_hi,
                                                       const std::vector<uint32_t>& init,
                                                       double horizon, uint64_t seed) {
  if (!(lambda_lo < lambda_hi)) throw std::invalid_argument("rates must be ordered");
  ClockStream base(seed, lambda_hi);
  auto hi = simulate(g, Variant::standard(), init, horizon, base);
  ThinnedClockStream thin(base, lambda_lo / lambda_hi, g.num_half_edges());
  auto lo = simulate(g, Variant::standard(), init, horizon, thin);
  return {lo.extinction_time, hi.extinction_time};
}

// ---------------------------------------------------------------------------
// Phase sweep

struct SweepSpec {
  std::string model = "er";  // "er" or "config"
  DegreeDistribution mu = DegreeDistribution::poisson(3.0);
  double mean_degree = 3.0;  // er only
  std::vector<double> lambdas;
  std::vector<uint32_t> ns;
  uint32_t reps = 200;
  double horizon_scale = 1.0;  // horizon = scale * n unless an absolute one is set
  double horizon_abs = 0.0;
  bool single_start = false;
  uint64_t seed = 1;
};

struct SweepRow {
  double lambda = 0.0;
  uint32_t n = 0;
  uint32_t reps = 0;
  double horizon = 0.0;
  double median_t = 0.0;
  double censored = 0.0;
  uint64_t graph_hash = 0;
};

struct PhaseFit {
  double lambda = 0.0;
  double loglog_slope = 0.0;
  double loglog_r2 = 0.0;
  double semilog_slope = 0.0;
  double semilog_r2 = 0.0;
  std::string label;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<PhaseFit> fits;
};

inline HalfEdgeGraph sweep_graph(const SweepSpec& spec, uint32_t n, uint64_t cell_seed) {
  RandomStream gen(cell_seed);
  if (spec.model == "er") return erdos_renyi(n, spec.mean_degree, gen);
  if (spec.model == "config") return configuration_model(n, spec.mu, gen);
  throw std::invalid_argument("unknown graph model: " + spec.model);
}

// Labels one rate's growth profile across the n-grid. Censoring at the
// largest size is itself the long-survival evidence; otherwise the median
// growth is fitted on log-log (polynomial) and semi-log (exponential) axes.
inline PhaseFit classify_phase(double lambda, const std::vector<SweepRow>& rows) {
  PhaseFit fit;
  fit.lambda = lambda;
  const SweepRow* largest = nullptr;
  bool all_censored = true;
  for (const auto& r : rows) {
    if (!largest || r.n > largest->n) largest = &r;
    if (r.censored < 1.0) all_censored = false;
  }
  std::vector<double> logn, n_lin, logm;
  for (const auto& r : rows) {
    if (r.median_t <= 0) continue;
    logn.push_back(std::log(double(r.n)));
    n_lin.push_back(double(r.n));
    logm.push_back(std::log(r.median_t));
  }
  if (logm.size() >= 3) {
    auto ll = fit_line(logn, logm);
    auto sl = fit_line(n_lin, logm);
    fit.loglog_slope = ll.slope;
    fit.loglog_r2 = ll.r2;
    fit.semilog_slope = sl.slope;
    fit.semilog_r2 = sl.r2;
  }
  if (all_censored) {
    fit.label = "exponential-like (censored)";
  } else if (largest && largest->censored >= 0.95) {
    fit.label = "exponential-like";
  } else if (logm.size() < 3) {
    fit.label = "indeterminate";
  } else if (fit.loglog_slope <= 1.5) {
    fit.label = "polynomial-like";
  } else if (fit.semilog_r2 > fit.loglog_r2) {
    fit.label = "exponential-like";
  } else {
    fit.label = "indeterminate";
  }
  return fit;
}

inline SweepResult phase_sweep(const SweepSpec& spec) {
  if (spec.ns.size() < 3) throw std::invalid_argument("need at least three sizes per rate");
  if (spec.lambdas.empty()) throw std::invalid_argument("empty rate grid");
  SweepResult out;
  for (size_t li = 0; li < spec.lambdas.size(); ++li) {
    double lambda = spec.lambdas[li];
    std::vector<SweepRow> cells;
    for (size_t ni = 0; ni < spec.ns.size(); ++ni) {
      uint32_t n = spec.ns[ni];
      uint64_t cell = li * 1000 + ni;
      auto g = sweep_graph(spec, n, derive_stream(spec.seed, "graph", cell));
      double horizon = spec.horizon_abs > 0 ? spec.horizon_abs : spec.horizon_scale * n;

      std::vector<uint32_t> init;
      if (!spec.single_start)
        for (uint32_t v = 0; v < g.n; ++v) init.push_back(v);

      SurvivalStats stats;
      if (spec.single_start) {
        RandomStream pick(derive_stream(spec.seed, "start", cell));
        std::vector<double> times;
        uint64_t censored = 0;
        for (uint32_t rep = 0; rep < spec.reps; ++rep) {
          std::vector<uint32_t> one = {uint32_t(pick.uniform_int(g.n))};
          ClockStream clocks(derive_stream(spec.seed, "cellrep", cell * 100000 + rep), lambda);
          auto t = simulate(g, Variant::standard(), one, horizon, clocks);
          times.push_back(t.extinction_time);
          if (t.censored) ++censored;
        }
        std::sort(times.begin(), times.end());
        stats.reps = spec.reps;
        stats.horizon = horizon;
        stats.sorted_times = std::move(times);
        stats.censored_fraction = double(censored) / spec.reps;
        for (double t : stats.sorted_times) stats.mean += t;
        stats.mean /= spec.reps;
        stats.median_censored = !stats.quantile_valid(0.5);
        stats.median = stats.median_censored ? horizon : stats.quantile(0.5);
      } else {
        stats = survival_time(g, lambda, init, horizon, spec.reps,
                              derive_stream(spec.seed, "cell", cell));
      }
      SweepRow row;
      row.graph_hash = g.hash();
      row.lambda = lambda;
      row.n = n;
      row.reps = spec.reps;
      row.horizon = horizon;
      row.median_t = stats.median;
      row.censored = stats.censored_fraction;
      cells.push_back(row);
    }
    out.fits.push_back(classify_phase(lambda, cells));
    out.rows.insert(out.rows.end(), cells.begin(), cells.end());
  }
  return out;
}

// Same pipeline, restricted to laws whose stored tail is genuinely heavier
// than exponential, for the long-survival contrast at small fixed rates.
inline SweepResult subexp_long_survival(const SweepSpec& spec) {
  if (spec.model != "config" || spec.mu.tail_class() != TailClass::subexponential)
    throw std::invalid_argument("needs a subexponential-tailed degree law");
  return phase_sweep(spec);
}

inline std::string sweep_csv(const SweepResult& res) {
  std::string out = "lambda,n,reps,horizon,median_t,censored_fraction,label\n";
  char buf[256];
  for (const auto& r : res.rows) {
    const PhaseFit* fit = nullptr;
    for (const auto& f : res.fits)
      if (f.lambda == r.lambda) fit = &f;
    std::snprintf(buf, sizeof(buf), "%.17g,%u,%u,%.17g,%.17g,%.17g,%s\n", r.lambda, r.n,
                  r.reps, r.horizon, r.median_t, r.censored,
                  fit ? fit->label.c_str() : "");
    out += buf;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Star persistence

inline HalfEdgeGraph star_graph(uint32_t d) {
  std::vector<std::pair<uint32_t, uint32_t>> edges;
  for (uint32_t leaf = 1; leaf <= d; ++leaf) edges.emplace_back(0, leaf);
  return graph_from_edges(d + 1, edges);
}

inline SurvivalStats star_persistence(uint32_t d, double lambda, uint32_t reps, double horizon,
                                      uint64_t seed) {
  if (d < 1) throw std::invalid_argument("star needs at least one leaf");
  auto g = star_graph(d);
  std::vector<uint32_t> init;
  for (uint32_t v = 0; v < g.n; ++v) init.push_back(v);
  return survival_time(g, lambda, init, horizon, reps, seed);
}

// log(median survival) against the hub degree.
inline LineFit star_slope(const std::vector<uint32_t>& degrees, double lambda, uint32_t reps,
                          double horizon, uint64_t seed) {
  std::vector<double> xs, ys;
  for (size_t i = 0; i < degrees.size(); ++i) {
    auto s = star_persistence(degrees[i], lambda, reps, horizon,
                              derive_stream(seed, "star", i));
    xs.push_back(double(degrees[i]));
    ys.push_back(std::log(s.median));
  }
  return fit_line(xs, ys);
}

// ---------------------------------------------------------------------------
// Relay along a path

// P(far endpoint infected at time C | near endpoint infected at 0) on a
// path with R edges.
inline double path_relay(uint32_t R, double lambda, double C, uint32_t reps, uint64_t seed) {
  if (R < 1) throw std::invalid_argument("path needs at least one edge");
  std::vector<std::pair<uint32_t, uint32_t>> edges;
  for (uint32_t v = 0; v < R; ++v) edges.emplace_back(v, v + 1);
  auto g = graph_from_edges(R + 1, edges);
  uint64_t hits = 0;
  for (uint32_t rep = 0; rep < reps; ++rep) {
    bool far_at_end = false;
    SimulateOptions opt;
    opt.occupancy = [&](double, double t1, const InfectionState& st) {
      if (t1 >= C) far_at_end = st.infected[R];
    };
    ClockStream clocks(derive_stream(seed, "relay", rep), lambda);
    simulate(g, Variant::standard(), {0}, C, clocks, opt);
    if (far_at_end) ++hits;
  }
  return double(hits) / reps;
}

struct RelayPoint {
  double lambda = 0.0;
  double c = 0.0;
  double probability = 0.0;
};

// Grid search for a (rate, time) pair relaying with probability >= target.
inline RelayPoint relay_search(uint32_t R, const std::vector<double>& lambdas,
                               const std::vector<double>& cs, uint32_t reps, double target,
                               uint64_t seed) {
  RelayPoint best;
  uint64_t cell = 0;
  for (double lambda : lambdas)
    for (double c : cs) {
      double p = path_relay(R, lambda, c, reps, derive_stream(seed, "grid", cell++));
      if (p > best.probability) best = {lambda, c, p};
      if (p >= target) return {lambda, c, p};
    }
  return best;
}

// ---------------------------------------------------------------------------
// Growth inside a certified base set

struct GrowthRow {
  uint64_t a = 0;
  uint32_t trials = 0;
  uint32_t failures = 0;
  bool skipped = false;  // outside the |A| <= alpha|W0| hypothesis
};

// Seeds `a` infected vertices inside w0 and checks the 5/4 growth of the
// infected count within w0 after time C.
inline std::vector<GrowthRow> expander_growth(const HalfEdgeGraph& g,
                                              const std::vector<uint32_t>& w0, double alpha,
                                              double lambda, double C,
                                              const std::vector<uint64_t>& a_values,
                                              uint32_t trials, uint64_t seed) {
  if (w0.empty()) throw std::invalid_argument("empty base set");
  std::vector<char> in_w0(g.n, 0);
  for (uint32_t v : w0) in_w0[v] = 1;
  std::vector<GrowthRow> out;
  for (size_t ai = 0; ai < a_values.size(); ++ai) {
    GrowthRow row;
    row.a = a_values[ai];
    row.trials = trials;
    if (row.a > uint64_t(alpha * double(w0.size()) + 1e-9) || row.a == 0) {
      row.skipped = true;
      out.push_back(row);
      continue;
    }
    std::vector<uint32_t> pool(w0);
    RandomStream pick(derive_stream(seed, "growthpick", ai));
    for (uint32_t trial = 0; trial < trials; ++trial) {
      for (uint64_t k = 0; k < row.a; ++k) {
        uint64_t swap_with = k + pick.uniform_int(pool.size() - k);
        std::swap(pool[k], pool[swap_with]);
      }
      std::vector<uint32_t> init(pool.begin(), pool.begin() + row.a);
      uint64_t final_count = 0;
      SimulateOptions opt;
      opt.occupancy = [&](double, double t1, const InfectionState& st) {
        if (t1 >= C) {
          final_count = 0;
          for (uint32_t v : w0) final_count += st.infected[v] ? 1 : 0;
        }
      };
      ClockStream clocks(derive_stream(seed, "growth", ai * 1000000 + trial), lambda);
      simulate(g, Variant::standard(), init, C, clocks, opt);
      if (4 * final_count < 5 * row.a) ++row.failures;
    }
    out.push_back(row);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Single-vertex starts

struct SingleStartReport {
  uint32_t reps = 0;
  double horizon = 0.0;
  double survive_fraction = 0.0;  // process level: fraction of runs censored
  double vertex_fraction = 0.0;   // vertex level: sampled starts with >= 1 survival
  bool graph_any = false;         // graph level: any survival at all
  uint64_t in_reps = 0, in_survive = 0;
  uint64_t out_reps = 0, out_survive = 0;
  double survive_given_in = 0.0;
  double survive_given_out = 0.0;
};

inline SingleStartReport single_vertex_start(const HalfEdgeGraph& g, double lambda,
                                             uint32_t reps, double horizon,
                                             const std::vector<uint32_t>& w0, uint64_t seed) {
  SingleStartReport rep;
  rep.reps = reps;
  rep.horizon = horizon;
  std::vector<char> in_w0(g.n, 0);
  for (uint32_t v : w0) in_w0[v] = 1;
  std::vector<char> sampled(g.n, 0), survived_from(g.n, 0);
  RandomStream pick(derive_stream(seed, "startpick"));
  uint64_t survive = 0;
  for (uint32_t r = 0; r < reps; ++r) {
    uint32_t v = uint32_t(pick.uniform_int(g.n));
    sampled[v] = 1;
    ClockStream clocks(derive_stream(seed, "startrep", r), lambda);
    auto t = simulate(g, Variant::standard(), {v}, horizon, clocks);
    bool ok = t.censored;
    if (ok) {
      ++survive;
      survived_from[v] = 1;
    }
    if (in_w0[v]) {
      ++rep.in_reps;
      rep.in_survive += ok;
    } else {
      ++rep.out_reps;
      rep.out_survive += ok;
    }
  }
  rep.survive_fraction = double(survive) / reps;
  uint64_t nsampled = 0, nsurv = 0;
  for (uint32_t v = 0; v < g.n; ++v) {
    nsampled += sampled[v];
    nsurv += survived_from[v];
  }
  rep.vertex_fraction = nsampled ? double(nsurv) / double(nsampled) : 0.0;
  rep.graph_any = survive > 0;
  rep.survive_given_in = rep.in_reps ? double(rep.in_survive) / double(rep.in_reps) : 0.0;
  rep.survive_given_out = rep.out_reps ? double(rep.out_survive) / double(rep.out_reps) : 0.0;
  return rep;
}

}  // namespace contagion
