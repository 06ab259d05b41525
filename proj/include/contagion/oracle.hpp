#pragma once

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "contagion/dynamics.hpp"
#include "contagion/graph.hpp"
#include "contagion/graphgen.hpp"

namespace contagion {

inline constexpr uint64_t kStateCap = uint64_t(1) << 24;
inline constexpr double kResidualTol = 1e-10;

// Continuous-time chain over the subsets of non-pinned vertices. States are
// bit-packed subset indices; pinned vertices are excluded from the space.
class ChainSpec {
 public:
  ChainSpec(const HalfEdgeGraph& g, const Variant& var, double lambda)
      : g_(g), var_(var), lambda_(lambda) {
    std::vector<char> pinned(g.n, 0);
    for (uint32_t v : var.permanent) pinned.at(v) = 1;
    for (uint32_t v = 0; v < g.n; ++v)
      if (!pinned[v]) free_.push_back(v);
    if (free_.size() >= 25 || (uint64_t(1) << free_.size()) > kStateCap)
      throw std::invalid_argument("state space exceeds the exact-solve cap");
    slot_.assign(g.n, kNoVertex);
    for (uint32_t i = 0; i < free_.size(); ++i) slot_[free_[i]] = i;
    if (var.delayed() && !g.root)
      throw std::invalid_argument("delayed variant needs a rooted graph");
    if (var.delayed() || g.root) {
      depth_of_state_ = true;
      pinned_r_ = 0;
      for (uint32_t v : var.permanent)
        if (g.depth[v] != kUnreached) pinned_r_ = std::max(pinned_r_, g.depth[v]);
    }
  }

  uint64_t num_states() const { return uint64_t(1) << free_.size(); }
  uint32_t num_free() const { return uint32_t(free_.size()); }
  const std::vector<uint32_t>& free_vertices() const { return free_; }
  double lambda() const { return lambda_; }
  const Variant& variant() const { return var_; }
  const HalfEdgeGraph& graph() const { return g_; }

  uint64_t pack(const std::vector<uint32_t>& infected_free) const {
    uint64_t x = 0;
    for (uint32_t v : infected_free) {
      if (slot_.at(v) == kNoVertex) throw std::invalid_argument("vertex is pinned");
      x |= uint64_t(1) << slot_[v];
    }
    return x;
  }

  // Max depth over infected vertices, pinned ones included.
  uint32_t depth_r(uint64_t x) const {
    if (g_.depth.size() != g_.n) return 0;
    uint32_t r = pinned_r_;
    for (uint32_t i = 0; i < free_.size(); ++i)
      if ((x >> i) & 1) {
        uint32_t d = g_.depth[free_[i]];
        if (d != kUnreached) r = std::max(r, d);
      }
    return r;
  }

  double rate_scale(uint64_t x) const {
    return var_.delayed() ? std::pow(var_.theta, double(depth_r(x))) : 1.0;
  }

  // Enumerate transitions out of x as (target, rate) pairs.
  template <typename Fn>
  void transitions(uint64_t x, Fn&& fn) const {
    double scale = rate_scale(x);
    auto infected = [&](uint32_t v) {
      return slot_[v] == kNoVertex ? true : ((x >> slot_[v]) & 1) != 0;
    };
    uint64_t free_infected = x;
    for (uint32_t i = 0; i < free_.size(); ++i) {
      uint32_t v = free_[i];
      if ((x >> i) & 1) {
        bool valid = var_.suppressed != v || free_infected == (uint64_t(1) << i);
        bool norec = false;
        for (uint32_t u : var_.no_recovery) norec |= (u == v);
        if (valid && !norec) fn(x & ~(uint64_t(1) << i), scale);
      } else {
        double rate = 0.0;
        for (uint64_t h = g_.he_begin(v); h < g_.he_end(v); ++h) {
          uint32_t u = g_.owner(g_.matching[h]);
          if (u != v && infected(u)) rate += lambda_;
        }
        if (rate > 0.0) fn(x | (uint64_t(1) << i), scale * rate);
      }
    }
  }

 private:
  const HalfEdgeGraph& g_;
  Variant var_;
  double lambda_;
  std::vector<uint32_t> free_;
  std::vector<uint32_t> slot_;
  bool depth_of_state_ = false;
  uint32_t pinned_r_ = 0;
};

namespace detail {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

inline SpMat build_generator(const ChainSpec& spec) {
  const uint64_t N = spec.num_states();
  std::vector<Triplet> trip;
  for (uint64_t x = 0; x < N; ++x) {
    double out = 0.0;
    spec.transitions(x, [&](uint64_t y, double rate) {
      trip.emplace_back(int(x), int(y), rate);
      out += rate;
    });
    trip.emplace_back(int(x), int(x), -out);
  }
  const int n = int(N);
  SpMat Q(n, n);
  Q.setFromTriplets(trip.begin(), trip.end());
  return Q;
}

inline void check_row_sums(const SpMat& Q) {
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(Q.cols());
  double worst = (Q * ones).cwiseAbs().maxCoeff();
  if (worst > 1e-12) throw std::logic_error("generator row sums exceed tolerance");
}

// Direct LU below the size where its fill-in is cheap; above it, a
// preconditioned Krylov solve whose answer is only accepted against an
// explicit residual bound, with LU as the fallback. Every path ends
// certified, so callers' tolerance checks keep their meaning.
inline Eigen::VectorXd solve_sparse(const SpMat& A, const Eigen::VectorXd& b,
                                    const char* singular_msg) {
  const double bscale = std::max(1.0, b.cwiseAbs().maxCoeff());
  if (A.rows() > 192) {
    Eigen::BiCGSTAB<SpMat> krylov;
    krylov.setTolerance(1e-14);
    krylov.setMaxIterations(20000);
    krylov.compute(A);
    Eigen::VectorXd x = krylov.solve(b);
    if (x.allFinite()) {
      if ((A * x - b).cwiseAbs().maxCoeff() <= 1e-11 * bscale) return x;
      x += krylov.solve((b - A * x).eval());
      if (x.allFinite() && (A * x - b).cwiseAbs().maxCoeff() <= 1e-11 * bscale) return x;
    }
  }
  Eigen::SparseLU<SpMat> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success) throw std::runtime_error(singular_msg);
  Eigen::VectorXd x = lu.solve(b);
  for (int pass = 0; pass < 2; ++pass) x += lu.solve(b - A * x);
  return x;
}

}  // namespace detail

// Solve pi Q = 0, sum(pi) = 1 through the occupation ratios nu(y) =
// pi(y)/pi(empty): the balance equations restricted away from the empty
// state read Q^T nu = -(rates out of empty), a nonsingular system with the
// generator's sign structure, so the same certified solver applies.
inline std::vector<double> stationary(const ChainSpec& spec) {
  if (spec.variant().permanent.empty())
    throw std::invalid_argument("no stationary distribution; use hitting_time");
  const int N = int(spec.num_states());
  auto Q = detail::build_generator(spec);
  detail::check_row_sums(Q);
  if (N == 1) return {1.0};

  std::vector<detail::Triplet> trip;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(N - 1);
  for (int k = 0; k < Q.outerSize(); ++k)
    for (detail::SpMat::InnerIterator it(Q, k); it; ++it) {
      if (it.col() == 0) continue;
      if (it.row() == 0)
        b[it.col() - 1] -= it.value();
      else
        trip.emplace_back(int(it.col()) - 1, int(it.row()) - 1, it.value());
    }
  detail::SpMat A(N - 1, N - 1);
  A.setFromTriplets(trip.begin(), trip.end());

  Eigen::VectorXd nu =
      detail::solve_sparse(A, b, "singular balance system: chain is not irreducible");
  double total = 1.0;
  for (int i = 0; i < N - 1; ++i) total += nu[i];
  Eigen::VectorXd pi(N);
  pi[0] = 1.0 / total;
  for (int i = 0; i < N - 1; ++i) pi[i + 1] = nu[i] / total;

  double residual = (detail::SpMat(Q.transpose()) * pi).cwiseAbs().maxCoeff();
  if (residual > kResidualTol) throw std::runtime_error("stationary solve residual too large");
  std::vector<double> out(pi.data(), pi.data() + N);
  return out;
}

// Expected time to hit `target` from each state (restricted solve on the
// complement of the target set).
inline std::vector<double> hitting_times(const ChainSpec& spec,
                                         const std::vector<char>& target) {
  const uint64_t N = spec.num_states();
  if (target.size() != N) throw std::invalid_argument("target mask size mismatch");
  std::vector<int64_t> index(N, -1);
  std::vector<uint64_t> states;
  for (uint64_t x = 0; x < N; ++x)
    if (!target[x]) {
      index[x] = int64_t(states.size());
      states.push_back(x);
    }
  const int M = int(states.size());
  std::vector<detail::Triplet> trip;
  Eigen::VectorXd b = Eigen::VectorXd::Constant(M, -1.0);
  for (int i = 0; i < M; ++i) {
    double out = 0.0;
    spec.transitions(states[i], [&](uint64_t y, double rate) {
      out += rate;
      if (index[y] >= 0) trip.emplace_back(i, int(index[y]), rate);
    });
    trip.emplace_back(i, i, -out);
    if (out == 0.0) throw std::invalid_argument("target unreachable from some state");
  }
  detail::SpMat A(M, M);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::VectorXd h =
      detail::solve_sparse(A, b, "hitting-time system is singular: target unreachable");
  if ((A * h - b).cwiseAbs().maxCoeff() > kResidualTol)
    throw std::runtime_error("hitting-time residual too large");
  std::vector<double> full(N, 0.0);
  for (int i = 0; i < M; ++i) full[states[i]] = h[i];
  return full;
}

// Single-start version restricted to the forward-reachable part of the
// space, which for structured variants is a small fraction of it.
inline double hitting_time(const ChainSpec& spec, uint64_t start,
                           const std::vector<char>& target) {
  const uint64_t N = spec.num_states();
  if (target.size() != N) throw std::invalid_argument("target mask size mismatch");
  if (target.at(start)) return 0.0;

  std::vector<int64_t> index(N, -1);
  std::vector<uint64_t> states = {start};
  index[start] = 0;
  for (size_t head = 0; head < states.size(); ++head)
    spec.transitions(states[head], [&](uint64_t y, double) {
      if (!target[y] && index[y] < 0) {
        index[y] = int64_t(states.size());
        states.push_back(y);
      }
    });

  const int M = int(states.size());
  std::vector<detail::Triplet> trip;
  Eigen::VectorXd b = Eigen::VectorXd::Constant(M, -1.0);
  for (int i = 0; i < M; ++i) {
    double out = 0.0;
    spec.transitions(states[i], [&](uint64_t y, double rate) {
      out += rate;
      if (index[y] >= 0) trip.emplace_back(i, int(index[y]), rate);
    });
    trip.emplace_back(i, i, -out);
    if (out == 0.0) throw std::invalid_argument("target unreachable from some state");
  }
  detail::SpMat A(M, M);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::VectorXd h =
      detail::solve_sparse(A, b, "hitting-time system is singular: target unreachable");
  if ((A * h - b).cwiseAbs().maxCoeff() > kResidualTol)
    throw std::runtime_error("hitting-time residual too large");
  return h[0];
}

struct RecursionReport {
  double lhs = 0.0;   // suppressed-chain excursion mean at the root
  double rhs = 0.0;   // product assembled from per-subtree solves
  double abs_error = 0.0;
  std::vector<double> subtree_means;
};

// Excursion identity at the root: the suppressed-recovery excursion mean
// from the lone-root state factorizes over the root's subtrees.
inline RecursionReport verify_recursion_tree(const RootedTree& tree, double lambda) {
  if (!tree.rho_plus) throw std::invalid_argument("tree needs a parent above the root");
  RecursionReport rep;

  ChainSpec spec(tree.g, Variant::root_suppressed(*tree.rho_plus, tree.rho), lambda);
  std::vector<char> target(spec.num_states(), 0);
  target[0] = 1;
  rep.lhs = hitting_time(spec, spec.pack({tree.rho}), target);

  rep.rhs = 1.0;
  for (uint64_t h = tree.g.he_begin(tree.rho); h < tree.g.he_end(tree.rho); ++h) {
    uint32_t child = tree.g.owner(tree.g.matching[h]);
    if (child == *tree.rho_plus) continue;
    auto sub = extract_subtree(tree, child);
    auto subp = with_parent(sub);
    ChainSpec child_spec(subp.g, Variant::root_added(*subp.rho_plus), lambda);
    std::vector<char> child_target(child_spec.num_states(), 0);
    child_target[0] = 1;
    double mean = hitting_time(child_spec, child_spec.pack({subp.rho}), child_target);
    rep.subtree_means.push_back(mean);
    rep.rhs *= 1.0 + lambda * mean;
  }
  rep.abs_error = std::abs(rep.lhs - rep.rhs);
  return rep;
}

struct StationaryReport {
  double pi_empty = 0.0;
  double exit_rate = 0.0;     // total rate out of the all-healthy state
  double return_mean = 0.0;   // expected time back to all-healthy after leaving
  double identity_error = 0.0;
};

// pi(empty)^{-1} = 1 + (exit rate) * E[return time after leaving empty].
inline StationaryReport verify_stationary_identity(const HalfEdgeGraph& g, const Variant& var,
                                                   double lambda) {
  ChainSpec spec(g, var, lambda);
  StationaryReport rep;
  auto pi = stationary(spec);
  rep.pi_empty = pi[0];

  double out = 0.0;
  std::vector<std::pair<uint64_t, double>> exits;
  spec.transitions(0, [&](uint64_t y, double rate) {
    exits.emplace_back(y, rate);
    out += rate;
  });
  rep.exit_rate = out;
  if (out == 0.0) throw std::invalid_argument("all-healthy state is absorbing");

  std::vector<char> target(spec.num_states(), 0);
  target[0] = 1;
  auto h = hitting_times(spec, target);
  double ret = 0.0;
  for (auto [y, rate] : exits) ret += (rate / out) * h[y];
  rep.return_mean = ret;
  rep.identity_error = std::abs(1.0 / rep.pi_empty - (1.0 + out * ret));
  return rep;
}

// Entry-wise check of the dilation reweighting: the dilated chain's
// stationary law is proportional to theta^{-r(x)} times the undilated one.
inline double delayed_reweight_error(const HalfEdgeGraph& g, const Variant& base, double lambda,
                                     double theta) {
  ChainSpec plain(g, base, lambda);
  ChainSpec slow(g, base.with_theta(theta), lambda);
  auto pi = stationary(plain);
  auto nu = stationary(slow);
  double Z = 0.0;
  std::vector<double> expect(pi.size());
  for (uint64_t x = 0; x < pi.size(); ++x) {
    expect[x] = std::pow(theta, -double(plain.depth_r(x))) * pi[x];
    Z += expect[x];
  }
  double worst = 0.0;
  for (uint64_t x = 0; x < pi.size(); ++x)
    worst = std::max(worst, std::abs(expect[x] / Z - nu[x]));
  return worst;
}

}  // namespace contagion
