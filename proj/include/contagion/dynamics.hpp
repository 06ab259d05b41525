#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

#include "contagion/graph.hpp"
#include "contagion/rng.hpp"
#include "contagion/stats.hpp"

namespace contagion {

// Which vertices are pinned, whose recoveries are restricted, and whether
// holding times are depth-dilated. theta == 1 means no dilation.
struct Variant {
  std::vector<uint32_t> permanent;
  std::vector<uint32_t> no_recovery;   // recoveries at these vertices are ignored
  uint32_t suppressed = kNoVertex;     // recovery valid only as the lone free infected
  double theta = 1.0;

  bool delayed() const { return theta < 1.0; }

  static Variant standard() { return {}; }
  static Variant root_added(uint32_t rho_plus) {
    Variant v;
    v.permanent = {rho_plus};
    return v;
  }
  static Variant root_suppressed(uint32_t rho_plus, uint32_t rho) {
    Variant v;
    v.permanent = {rho_plus};
    v.suppressed = rho;
    return v;
  }
  static Variant both_fixed(uint32_t a, uint32_t b) {
    Variant v;
    v.permanent = {a, b};
    return v;
  }
  static Variant ignoring_recovery_at(uint32_t u) {
    Variant v;
    v.no_recovery = {u};
    return v;
  }
  Variant with_theta(double th) const {
    if (!(th > 0.0 && th <= 1.0)) throw std::invalid_argument("theta must lie in (0, 1]");
    Variant v = *this;
    v.theta = th;
    return v;
  }
};

struct InfectionState {
  std::vector<char> infected;
  uint32_t infected_count = 0;
  std::vector<uint32_t> depth_count;  // rooted graphs only
  uint32_t r = 0;                     // max depth over infected vertices, 0 when none
};

struct Event {
  double t;
  uint32_t vertex;
  bool infected;
};

struct Trajectory {
  double extinction_time = 0.0;
  bool censored = false;
  uint32_t max_depth = 0;
  uint64_t event_count = 0;
  std::vector<Event> events;
};

struct SimulateOptions {
  bool stop_at_empty = true;
  bool record_events = false;
  uint64_t audit_every = 0;  // recompute depth bookkeeping every k-th event
  // Called with [t0, t1) and the state occupied on that interval.
  std::function<void(double, double, const InfectionState&)> occupancy;
};

namespace detail {

// Lazy cursor over one entity's absolute event times. The consumed prefix is
// a pure function of (seed, entity), so coupled runs see identical clocks.
struct Cursor {
  double t = 0.0;
  uint64_t idx = 0;
};

template <class Clocks = ClockStream>
class Engine {
 public:
  Engine(const HalfEdgeGraph& g, const Variant& var, const Clocks& clocks)
      : g_(g), var_(var), clocks_(clocks) {
    const uint32_t n = g.n;
    if (var.delayed() && !g.root) throw std::invalid_argument("delayed variant needs a rooted graph");
    perm_.assign(n, 0);
    norec_.assign(n, 0);
    for (uint32_t v : var.permanent) perm_.at(v) = 1;
    for (uint32_t v : var.no_recovery) norec_.at(v) = 1;
    rec_.assign(n, Cursor{});
    inf_.assign(g.num_half_edges(), Cursor{});
    rec_next_.assign(n, -1.0);
    inf_next_.assign(g.num_half_edges(), -1.0);
    rooted_ = g.root.has_value();
    state_.infected.assign(n, 0);
    if (rooted_) {
      uint32_t dmax = 0;
      for (uint32_t d : g.depth)
        if (d != kUnreached) dmax = std::max(dmax, d);
      state_.depth_count.assign(dmax + 1, 0);
    }
  }

  Trajectory run(const std::vector<uint32_t>& init, double horizon, const SimulateOptions& opt) {
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
    for (uint32_t v : init)
      if (!state_.infected.at(v)) infect(v, 0.0);
    for (uint32_t v : var_.permanent)
      if (!state_.infected[v]) infect(v, 0.0);

    Trajectory out;
    out.max_depth = state_.r;
    double t = 0.0, tau_last = 0.0;
    double dil = dilation();

    if (free_count_ == 0 && opt.stop_at_empty) {
      if (opt.occupancy) opt.occupancy(0.0, 0.0, state_);
      return out;
    }

    while (!heap_.empty()) {
      auto [tau, e] = heap_.top();
      heap_.pop();
      if (!consume(tau, e)) continue;

      // Undelayed time IS the clock time; accumulating increments instead
      // would pick up event-sequence-dependent rounding and break the exact
      // couplings shared clocks are meant to provide.
      double t_new = var_.delayed() ? t + dil * (tau - tau_last) : tau;
      if (t_new > horizon) {
        if (opt.occupancy) opt.occupancy(t, horizon, state_);
        out.extinction_time = horizon;
        out.censored = true;
        return out;
      }
      if (opt.occupancy) opt.occupancy(t, t_new, state_);
      t = t_new;
      tau_last = tau;
      out.event_count += 1;
      if (opt.audit_every && out.event_count % opt.audit_every == 0) audit();

      if (e < g_.n) {
        uint32_t v = uint32_t(e);
        bool valid = (var_.suppressed != v) || (free_count_ == 1);
        if (valid) {
          recover(v);
          if (opt.record_events) out.events.push_back({t, v, false});
          if (free_count_ == 0 && opt.stop_at_empty) {
            out.extinction_time = t;
            out.max_depth = std::max(out.max_depth, state_.r);
            return out;
          }
        } else {
          schedule_recovery(v, tau);
        }
      } else {
        uint64_t h = e - g_.n;
        schedule_infection(h, tau);
        uint32_t w = g_.owner(g_.matching[h]);
        if (!state_.infected[w]) {
          infect(w, tau);
          if (opt.record_events) out.events.push_back({t, w, true});
          out.max_depth = std::max(out.max_depth, state_.r);
        }
      }
      dil = dilation();
    }
    // Clock heap drained: nothing is active any more (possible only when the
    // run continues past emptiness with no pinned vertices).
    if (opt.occupancy && horizon < std::numeric_limits<double>::infinity())
      opt.occupancy(t, horizon, state_);
    out.extinction_time = horizon;
    out.censored = true;
    return out;
  }

  const InfectionState& state() const { return state_; }

 private:
  using HeapEntry = std::pair<double, uint64_t>;

  double dilation() const {
    return var_.delayed() ? std::pow(var_.theta, -double(state_.r)) : 1.0;
  }

  bool recovery_active(uint32_t v) const {
    return state_.infected[v] && !perm_[v] && !norec_[v];
  }

  bool consume(double tau, uint64_t e) {
    if (e < g_.n) {
      uint32_t v = uint32_t(e);
      return recovery_active(v) && tau == rec_next_[v];
    }
    uint64_t h = e - g_.n;
    return state_.infected[g_.he_owner[h]] && tau == inf_next_[h];
  }

  void schedule_recovery(uint32_t v, double after) {
    Cursor& c = rec_[v];
    while (c.t <= after) c.t += clocks_.recovery_gap(v, c.idx++);
    rec_next_[v] = c.t;
    heap_.push({c.t, v});
  }
  void schedule_infection(uint64_t h, double after) {
    Cursor& c = inf_[h];
    while (c.t <= after) c.t += clocks_.infection_gap(h, c.idx++);
    inf_next_[h] = c.t;
    heap_.push({c.t, g_.n + h});
  }

  void infect(uint32_t v, double tau) {
    state_.infected[v] = 1;
    state_.infected_count += 1;
    if (!perm_[v]) free_count_ += 1;
    if (rooted_) {
      uint32_t d = g_.depth[v] == kUnreached ? 0 : g_.depth[v];
      state_.depth_count[d] += 1;
      state_.r = std::max(state_.r, d);
    }
    if (recovery_active(v)) schedule_recovery(v, tau);
    for (uint64_t h = g_.he_begin(v); h < g_.he_end(v); ++h) schedule_infection(h, tau);
  }

  void recover(uint32_t v) {
    state_.infected[v] = 0;
    state_.infected_count -= 1;
    free_count_ -= 1;
    if (rooted_) {
      uint32_t d = g_.depth[v] == kUnreached ? 0 : g_.depth[v];
      state_.depth_count[d] -= 1;
      while (state_.r > 0 && state_.depth_count[state_.r] == 0) state_.r -= 1;
    }
  }

  void audit() const {
    uint32_t count = 0;
    std::vector<uint32_t> dc(state_.depth_count.size(), 0);
    uint32_t r = 0;
    for (uint32_t v = 0; v < g_.n; ++v) {
      if (!state_.infected[v]) continue;
      ++count;
      if (rooted_) {
        uint32_t d = g_.depth[v] == kUnreached ? 0 : g_.depth[v];
        dc[d] += 1;
        r = std::max(r, d);
      }
    }
    if (count != state_.infected_count || (rooted_ && (dc != state_.depth_count || r != state_.r)))
      throw std::logic_error("incremental depth bookkeeping diverged from recount");
  }

  const HalfEdgeGraph& g_;
  Variant var_;
  Clocks clocks_;
  std::vector<char> perm_, norec_;
  std::vector<Cursor> rec_, inf_;
  std::vector<double> rec_next_, inf_next_;
  std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<HeapEntry>> heap_;
  InfectionState state_;
  uint32_t free_count_ = 0;
  bool rooted_ = false;
};

}  // namespace detail

template <class Clocks = ClockStream>
inline Trajectory simulate(const HalfEdgeGraph& g, const Variant& var,
                           const std::vector<uint32_t>& init, double horizon,
                           const Clocks& clocks, const SimulateOptions& opt = {}) {
  detail::Engine<Clocks> engine(g, var, clocks);
  return engine.run(init, horizon, opt);
}

inline std::vector<Trajectory> simulate_coupled(const HalfEdgeGraph& g,
                                                const std::vector<Variant>& variants,
                                                const std::vector<std::vector<uint32_t>>& inits,
                                                double horizon, const ClockStream& clocks,
                                                const SimulateOptions& opt = {}) {
  if (variants.size() != inits.size())
    throw std::invalid_argument("coupled runs need one init per variant");
  std::vector<Trajectory> out;
  out.reserve(variants.size());
  for (size_t i = 0; i < variants.size(); ++i)
    out.push_back(simulate(g, variants[i], inits[i], horizon, clocks, opt));
  return out;
}

struct SurvivalStats {
  uint64_t reps = 0;
  double horizon = 0.0;
  double censored_fraction = 0.0;
  double mean = 0.0;  // mean of horizon-capped times
  double median = 0.0;
  bool median_censored = false;
  std::vector<double> sorted_times;

  // Quantiles are meaningful only below the uncensored mass.
  bool quantile_valid(double q) const { return q < 1.0 - censored_fraction; }
  double quantile(double q) const { return quantile_sorted(sorted_times, q); }
};

inline std::vector<Trajectory> simulate_replicas(const HalfEdgeGraph& g, const Variant& var,
                                                 double lambda,
                                                 const std::vector<uint32_t>& init, double horizon,
                                                 uint32_t reps, uint64_t seed,
                                                 const SimulateOptions& opt = {}) {
  std::vector<Trajectory> out(reps);
  parallel_for(reps, [&](uint64_t rep) {
    ClockStream clocks(derive_stream(seed, "replica", rep), lambda);
    out[rep] = simulate(g, var, init, horizon, clocks, opt);
  });
  return out;
}

inline SurvivalStats survival_time(const HalfEdgeGraph& g, double lambda,
                                   const std::vector<uint32_t>& init, double horizon,
                                   uint32_t reps, uint64_t seed,
                                   const Variant& var = Variant::standard()) {
  if (reps < 1) throw std::invalid_argument("reps >= 1 required");
  auto runs = simulate_replicas(g, var, lambda, init, horizon, reps, seed);
  SurvivalStats s;
  s.reps = reps;
  s.horizon = horizon;
  s.sorted_times.reserve(reps);
  uint64_t censored = 0;
  double sum = 0.0;
  for (const auto& t : runs) {
    censored += t.censored ? 1 : 0;
    sum += t.extinction_time;
    s.sorted_times.push_back(t.extinction_time);
  }
  std::sort(s.sorted_times.begin(), s.sorted_times.end());
  s.censored_fraction = double(censored) / double(reps);
  s.mean = sum / double(reps);
  s.median_censored = !s.quantile_valid(0.5);
  s.median = s.median_censored ? horizon : s.quantile(0.5);
  return s;
}

struct DepthTail {
  uint64_t reps = 0;
  std::vector<uint64_t> count_ge;  // count_ge[h] = number of runs with H >= h
  std::vector<double> tail;
  double slope = 0.0;     // log-linear fit of tail over well-populated depths
  double slope_se = 0.0;
  uint32_t fit_points = 0;
};

inline DepthTail depth_excursion(const RootedTree& tree, double lambda, uint32_t reps,
                                 uint64_t seed,
                                 double horizon = std::numeric_limits<double>::infinity()) {
  if (!tree.rho_plus) throw std::invalid_argument("depth excursion needs a parent above the root");
  Variant var = Variant::root_added(*tree.rho_plus);
  auto runs = simulate_replicas(tree.g, var, lambda, {tree.rho}, horizon, reps, seed);
  DepthTail out;
  out.reps = reps;
  uint32_t hmax = 0;
  for (const auto& t : runs) hmax = std::max(hmax, t.max_depth);
  out.count_ge.assign(hmax + 2, 0);
  for (const auto& t : runs) out.count_ge[t.max_depth] += 1;
  for (uint32_t h = hmax + 1; h-- > 0;) out.count_ge[h] += out.count_ge[h + 1];
  out.tail.resize(out.count_ge.size());
  for (size_t h = 0; h < out.count_ge.size(); ++h)
    out.tail[h] = double(out.count_ge[h]) / double(reps);

  std::vector<double> xs, ys;
  for (uint32_t h = 1; h < out.count_ge.size(); ++h)
    if (out.count_ge[h] >= 100) {
      xs.push_back(double(h));
      ys.push_back(std::log(out.tail[h]));
    }
  out.fit_points = uint32_t(xs.size());
  if (xs.size() >= 2) {
    auto fit = fit_line(xs, ys);
    out.slope = fit.slope;
    if (xs.size() > 2) {
      double sxx = 0.0, xbar = 0.0, ss = 0.0;
      for (double x : xs) xbar += x;
      xbar /= double(xs.size());
      for (size_t i = 0; i < xs.size(); ++i) {
        double resid = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ss += resid * resid;
        sxx += (xs[i] - xbar) * (xs[i] - xbar);
      }
      out.slope_se = std::sqrt(ss / double(xs.size() - 2) / sxx);
    }
  }
  return out;
}

}  // namespace contagion
