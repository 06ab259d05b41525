#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

namespace contagion {

struct RunningStat {
  uint64_t n = 0;
  double mean = 0, m2 = 0;
  void push(double x) {
    ++n;
    double d = x - mean;
    mean += d / double(n);
    m2 += d * (x - mean);
  }
  double variance() const { return n > 1 ? m2 / double(n - 1) : 0.0; }
  double stddev() const { return std::sqrt(variance()); }
  double sem() const { return n > 0 ? stddev() / std::sqrt(double(n)) : 0.0; }
};

inline double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  double pos = q * double(sorted.size() - 1);
  size_t lo = size_t(pos);
  size_t hi = std::min(lo + 1, sorted.size() - 1);
  double frac = pos - double(lo);
  return sorted[lo] * (1 - frac) + sorted[hi] * frac;
}

inline double quantile(std::vector<double> xs, double q) {
  std::sort(xs.begin(), xs.end());
  return quantile_sorted(xs, q);
}

inline double median(std::vector<double> xs) { return quantile(std::move(xs), 0.5); }

// least squares y = a + b x; returns {intercept, slope, r2}
struct LineFit {
  double intercept = 0, slope = 0, r2 = 0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need >=2 points");
  double n = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  double den = n * sxx - sx * sx;
  LineFit f;
  if (den == 0) {
    f.slope = 0;
    f.intercept = sy / n;
    f.r2 = 0;
    return f;
  }
  f.slope = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / n;
  double ss_tot = syy - sy * sy / n;
  double ss_res = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    double e = y[i] - (f.intercept + f.slope * x[i]);
    ss_res += e * e;
  }
  f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

inline double chi2_upper_quantile(double k, double p_upper) {
  boost::math::chi_squared_distribution<double> dist(k);
  return boost::math::quantile(boost::math::complement(dist, p_upper));
}

inline double chi2_pvalue(double k, double statistic) {
  boost::math::chi_squared_distribution<double> dist(k);
  return boost::math::cdf(boost::math::complement(dist, statistic));
}

struct Chi2Result {
  double statistic = 0;
  double dof = 0;
  double threshold = 0;  // upper quantile at the chosen significance
  double pvalue = 1;
  bool pass = false;
};

inline Chi2Result chi2_gof(const std::vector<uint64_t>& observed,
                           const std::vector<double>& expected, double significance) {
  if (observed.size() != expected.size()) throw std::invalid_argument("chi2_gof: size mismatch");
  Chi2Result r;
  size_t used = 0;
  for (size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] <= 0) {
      if (observed[i] != 0) r.statistic = std::numeric_limits<double>::infinity();
      continue;
    }
    double d = double(observed[i]) - expected[i];
    r.statistic += d * d / expected[i];
    ++used;
  }
  r.dof = double(used - 1);
  r.threshold = chi2_upper_quantile(r.dof, significance);
  r.pvalue = std::isfinite(r.statistic) ? chi2_pvalue(r.dof, r.statistic) : 0.0;
  r.pass = r.statistic <= r.threshold;
  return r;
}

inline unsigned thread_budget() {
  if (const char* env = std::getenv("CONTAGION_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return unsigned(v);
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc ? hc : 1;
}

// static partition; fn(i) must be safe to run concurrently for distinct i
template <typename Fn>
void parallel_for(uint64_t n, Fn&& fn, unsigned threads = thread_budget()) {
  if (threads <= 1 || n <= 1) {
    for (uint64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  threads = unsigned(std::min<uint64_t>(threads, n));
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (uint64_t i = t; i < n; i += threads) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace contagion
