#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "contagion/rng.hpp"

namespace contagion {

enum class TailClass { exponential, subexponential, finite_support, undetermined };

inline const char* to_string(TailClass t) {
  switch (t) {
    case TailClass::exponential: return "exponential";
    case TailClass::subexponential: return "subexponential";
    case TailClass::finite_support: return "finite-support";
    default: return "undetermined";
  }
}

// Probability law on {0,1,2,...} stored densely up to a truncation point.
// Laws with infinite support are stored to the k where the remaining mass
// drops below 1e-12; the leftover is folded into the last atom and recorded.
class DegreeDistribution {
 public:
  static constexpr double kTruncationTarget = 1e-12;

  static DegreeDistribution poisson(double d) {
    if (!(d > 0)) throw std::invalid_argument("poisson: rate must be positive");
    std::vector<double> p;
    double pk = std::exp(-d);
    double cum = pk;
    p.push_back(pk);
    uint32_t k = 0;
    while (cum < 1.0 - kTruncationTarget || double(k) <= d) {
      ++k;
      pk *= d / double(k);
      p.push_back(pk);
      cum += pk;
      if (k > 100000) throw std::runtime_error("poisson: support truncation failed");
    }
    double leftover = std::max(0.0, 1.0 - cum);
    p.back() += leftover;
    return DegreeDistribution(std::move(p), TailClass::exponential, leftover, false);
  }

  // p_k = p (1-p)^k
  static DegreeDistribution geometric(double p) {
    if (!(p > 0 && p <= 1)) throw std::invalid_argument("geometric: p must be in (0,1]");
    std::vector<double> masses;
    double q = 1 - p;
    double pk = p, tail = q;
    masses.push_back(pk);
    while (tail >= kTruncationTarget) {
      pk *= q;
      masses.push_back(pk);
      tail *= q;
    }
    masses.back() += tail;
    return DegreeDistribution(std::move(masses), TailClass::exponential, tail, false);
  }

  static DegreeDistribution point(uint32_t k) {
    std::vector<double> p(k + 1, 0.0);
    p[k] = 1.0;
    return DegreeDistribution(std::move(p), TailClass::finite_support, 0.0, false);
  }

  // p_k proportional to exp(-a * k^beta); subexponential for beta < 1
  static DegreeDistribution stretched_exponential(double a, double beta, uint32_t kmin = 0) {
    if (!(a > 0) || !(beta > 0) || !(beta < 1))
      throw std::invalid_argument("stretched_exponential: need a > 0, beta in (0,1)");
    std::vector<double> w;
    double total = 0;
    for (uint32_t k = 0;; ++k) {
      double m = k < kmin ? 0.0 : std::exp(-a * std::pow(double(k), beta));
      w.push_back(m);
      total += m;
      if (k > std::max<uint32_t>(kmin + 8, 16) && m < kTruncationTarget * total) break;
      if (k > 2000000) throw std::runtime_error("stretched_exponential: truncation failed");
    }
    for (auto& m : w) m /= total;
    return DegreeDistribution(std::move(w), TailClass::subexponential, 0.0, false);
  }

  static DegreeDistribution from_masses(std::vector<double> masses,
                                        TailClass declared = TailClass::undetermined) {
    if (declared == TailClass::undetermined) declared = classify(masses);
    return DegreeDistribution(std::move(masses), declared, 0.0, true);
  }

  // CSV with lines "k,p"; '#' comments and blank lines skipped; must sum to 1 +- 1e-6
  static DegreeDistribution from_table_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("table: cannot open " + path);
    std::vector<double> masses;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      size_t first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      std::replace(line.begin(), line.end(), ',', ' ');
      std::istringstream ss(line);
      long long k;
      double p;
      if (!(ss >> k >> p) || k < 0)
        throw std::runtime_error("table: bad line " + std::to_string(lineno) + " in " + path);
      if (size_t(k) >= masses.size()) masses.resize(size_t(k) + 1, 0.0);
      masses[size_t(k)] += p;
    }
    if (masses.empty()) throw std::runtime_error("table: no entries in " + path);
    return from_masses(std::move(masses));
  }

  double pmf(uint32_t k) const { return k < p_.size() ? p_[k] : 0.0; }
  // P(X > k)
  double tail(uint32_t k) const {
    if (k + 1 >= tail_.size()) return 0.0;
    return tail_[k + 1];
  }
  uint32_t kmax() const { return uint32_t(p_.size()) - 1; }
  double mean() const { return mean_; }
  double second_moment() const { return m2_; }
  double branching_rate() const { return mean_ > 0 ? (m2_ - mean_) / mean_ : 0.0; }
  bool supercritical() const { return branching_rate() > 1.0; }
  TailClass tail_class() const { return tail_class_; }
  double truncation_epsilon() const { return truncation_epsilon_; }
  const std::vector<double>& masses() const { return p_; }

  uint32_t sample(RandomStream& rng) const {
    double u = rng.uniform();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return uint32_t(std::min<size_t>(it - cdf_.begin(), p_.size() - 1));
  }

  std::vector<uint32_t> sample_many(size_t n, RandomStream& rng) const {
    std::vector<uint32_t> out(n);
    for (auto& x : out) x = sample(rng);
    return out;
  }

  // Exponential / subexponential / finite-support heuristic for raw tables.
  // The top atom is excluded from tail scans (it may carry folded truncation
  // mass). Verdict: some grid epsilon must keep e^{eps k} p_k non-increasing
  // over the late tail, and the empirical decay rate must not have collapsed
  // between the early and late tail windows (a decaying rate is the stretched
  // signature; a finite table cannot distinguish it by grid membership alone).
  static TailClass classify(const std::vector<double>& masses) {
    int last_pos = -1;
    for (size_t k = 0; k < masses.size(); ++k) {
      if (masses[k] < 0) throw std::invalid_argument("negative mass");
      if (masses[k] > 0) last_pos = int(k);
    }
    if (last_pos < 0) throw std::invalid_argument("all-zero mass table");
    if (last_pos < 8) return TailClass::finite_support;
    int scan_end = last_pos - 1;

    auto decreasing_for = [&](double eps, int from, int to) {
      double prev = std::numeric_limits<double>::infinity();
      for (int k = from; k <= to; ++k) {
        if (masses[k] <= 0) continue;
        double v = std::log(masses[k]) + eps * k;
        if (v > prev + 1e-9) return false;
        prev = v;
      }
      return true;
    };
    // mean log-decay rate between the outermost positive atoms of a window
    auto window_rate = [&](int from, int to) -> double {
      int a = -1, b = -1;
      for (int k = from; k <= to; ++k)
        if (masses[k] > 0) {
          if (a < 0) a = k;
          b = k;
        }
      if (a < 0 || b <= a) return std::numeric_limits<double>::quiet_NaN();
      return (std::log(masses[a]) - std::log(masses[b])) / double(b - a);
    };

    if (!decreasing_for(0.0, last_pos / 2, scan_end)) return TailClass::undetermined;
    bool grid_hit = false;
    for (int j = 0; j <= 20 && !grid_hit; ++j)
      grid_hit = decreasing_for(std::ldexp(1.0, -j), last_pos / 2, scan_end);
    if (!grid_hit) return TailClass::subexponential;

    double r_early = window_rate(last_pos / 4, last_pos / 2);
    double r_late = window_rate(3 * last_pos / 4, scan_end);
    if (!std::isfinite(r_early) || !std::isfinite(r_late) || r_early <= 0)
      return TailClass::undetermined;
    return r_late >= 0.8 * r_early ? TailClass::exponential : TailClass::subexponential;
  }

 private:
  DegreeDistribution(std::vector<double> p, TailClass tc, double trunc_eps, bool validate)
      : p_(std::move(p)), tail_class_(tc), truncation_epsilon_(trunc_eps) {
    if (p_.empty()) throw std::invalid_argument("empty mass table");
    double total = 0;
    for (double m : p_) {
      if (m < 0 || !std::isfinite(m)) throw std::invalid_argument("invalid mass");
      total += m;
    }
    if (validate && std::abs(total - 1.0) > 1e-6)
      throw std::invalid_argument("masses must sum to 1 within 1e-6, got " + std::to_string(total));
    if (total <= 0) throw std::invalid_argument("zero total mass");
    for (double& m : p_) m /= total;
    while (p_.size() > 1 && p_.back() == 0.0) p_.pop_back();

    cdf_.resize(p_.size());
    std::partial_sum(p_.begin(), p_.end(), cdf_.begin());
    cdf_.back() = 1.0;
    tail_.resize(p_.size() + 1);
    tail_[p_.size()] = 0.0;
    for (size_t k = p_.size(); k-- > 0;) tail_[k] = tail_[k + 1] + p_[k];

    mean_ = 0;
    m2_ = 0;
    for (size_t k = 0; k < p_.size(); ++k) {
      mean_ += double(k) * p_[k];
      m2_ += double(k) * double(k) * p_[k];
    }
  }

  std::vector<double> p_, cdf_, tail_;
  TailClass tail_class_;
  double truncation_epsilon_ = 0;
  double mean_ = 0, m2_ = 0;
};

// mu'(k-1) = k mu(k) / mean: offspring law of a size-biased pick
inline DegreeDistribution size_biased(const DegreeDistribution& mu) {
  if (mu.mean() <= 0) throw std::invalid_argument("degenerate distribution");
  std::vector<double> q(mu.kmax(), 0.0);
  if (q.empty()) q.resize(1, 1.0);
  for (uint32_t k = 1; k <= mu.kmax(); ++k) q[k - 1] = double(k) * mu.pmf(k) / mu.mean();
  return DegreeDistribution::from_masses(std::move(q), mu.tail_class());
}

// restrict to k >= 1 and renormalize
inline DegreeDistribution condition_positive(const DegreeDistribution& mu) {
  double pos = 1.0 - mu.pmf(0);
  if (pos <= 0) throw std::invalid_argument("condition_positive: all mass at 0");
  std::vector<double> q(mu.kmax() + 1, 0.0);
  for (uint32_t k = 1; k <= mu.kmax(); ++k) q[k] = mu.pmf(k) / pos;
  return DegreeDistribution::from_masses(std::move(q), mu.tail_class());
}

struct AugmentReport {
  uint32_t k0 = 0;
  uint32_t kmax = 0;
  double Z = 0;
  bool second_branch = false;
};

// Tail inflation: masses p_j/2 up to k0 and sqrt(p_j) above, where k0 is the
// last k whose sqrt-tail sum still reaches 1/2 (ties count). When k0 is the
// top of the support only the top atom gets the square root.
inline DegreeDistribution augment(const DegreeDistribution& mu, AugmentReport* report = nullptr) {
  if (mu.tail_class() != TailClass::exponential && mu.tail_class() != TailClass::finite_support)
    throw std::invalid_argument("augmentation requires exponential tail");
  uint32_t kmax = mu.kmax();
  while (kmax > 0 && mu.pmf(kmax) == 0.0) --kmax;

  double sqrt_tail = 0;
  int64_t k0 = -1;
  std::vector<double> sq(kmax + 2, 0.0);
  for (int64_t k = kmax; k >= 0; --k) {
    sqrt_tail += std::sqrt(mu.pmf(uint32_t(k)));
    sq[size_t(k)] = sqrt_tail;
  }
  for (int64_t k = kmax; k >= 0; --k) {
    if (sq[size_t(k)] >= 0.5) {
      k0 = k;
      break;
    }
  }
  if (k0 < 0) throw std::runtime_error("augment: sqrt tail sums never reach 1/2");

  std::vector<double> w(kmax + 1, 0.0);
  bool second = uint32_t(k0) == kmax;
  if (!second) {
    for (uint32_t j = 0; j <= kmax; ++j)
      w[j] = j <= uint32_t(k0) ? mu.pmf(j) / 2 : std::sqrt(mu.pmf(j));
  } else {
    for (uint32_t j = 0; j < uint32_t(k0); ++j) w[j] = mu.pmf(j) / 2;
    w[uint32_t(k0)] = std::sqrt(mu.pmf(uint32_t(k0)));
  }
  double Z = std::accumulate(w.begin(), w.end(), 0.0);
  if (report) *report = AugmentReport{uint32_t(k0), kmax, Z, second};
  for (auto& m : w) m /= Z;
  return DegreeDistribution::from_masses(std::move(w), mu.tail_class());
}

struct DominationReport {
  bool dominated = true;
  int64_t worst_k = -1;
  double worst_excess = 0;  // empirical tail minus sharp tail at worst_k
};

// Adversarial removal keeps the `budget` largest samples' counts intact at
// every threshold simultaneously, so removing the smallest is exact worst
// case. Survivor tail counts are measured against the ORIGINAL sample count;
// the surviving mass above k must stay below sharp's tail.
inline DominationReport domination_test(const std::vector<uint32_t>& samples, size_t removal_budget,
                                        const DegreeDistribution& sharp) {
  if (samples.empty()) throw std::invalid_argument("domination_test: no samples");
  if (removal_budget * 3 > samples.size()) throw std::invalid_argument("outside lemma hypothesis");
  uint32_t vmax = *std::max_element(samples.begin(), samples.end());
  uint32_t kmax = std::max(vmax, sharp.kmax());
  std::vector<uint64_t> count(kmax + 2, 0);
  for (uint32_t s : samples) count[s]++;

  double n = double(samples.size());
  DominationReport rep;
  uint64_t cnt_le = 0, tail_cnt = samples.size();
  for (uint32_t k = 0; k <= kmax; ++k) {
    cnt_le += count[k];
    tail_cnt -= count[k];
    uint64_t removed_above = removal_budget > cnt_le ? removal_budget - cnt_le : 0;
    uint64_t kept_above = tail_cnt > removed_above ? tail_cnt - removed_above : 0;
    double emp = double(kept_above) / n;
    double excess = emp - sharp.tail(k);
    if (excess > 1e-12 && (rep.dominated || excess > rep.worst_excess)) {
      rep.dominated = false;
      if (rep.worst_k < 0) rep.worst_k = k;
      rep.worst_excess = std::max(rep.worst_excess, excess);
    }
  }
  return rep;
}

}  // namespace contagion
