#include "musclework/stats.hpp"

#include "musclework/error.hpp"

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace musclework {

double f_distribution_sf(double f, double d1, double d2) {
  if (!(d1 > 0.0 && d2 > 0.0)) throw InvalidArgument("F distribution needs positive degrees of freedom");
  if (std::isinf(f)) return 0.0;
  if (f <= 0.0) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::fisher_f_distribution<double>(d1, d2), f));
}

double t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw InvalidArgument("t distribution needs positive degrees of freedom");
  if (std::isinf(t)) return 0.0;
  const double tail =
      boost::math::cdf(boost::math::complement(boost::math::students_t_distribution<double>(df), std::abs(t)));
  return std::min(1.0, 2.0 * tail);
}

char eta_magnitude(double e) {
  if (e >= 0.14) return 'l';
  if (e >= 0.06) return 'm';
  if (e >= 0.01) return 's';
  return '-';
}

AnovaResult rm_anova_cells(const std::vector<std::vector<double>>& y) {
  const std::size_t n = y.size();
  if (n < 2) throw UnbalancedDesign("repeated-measures ANOVA needs at least two subjects");
  const std::size_t k = y.front().size();
  if (k < 2) throw UnbalancedDesign("repeated-measures ANOVA needs at least two conditions");
  for (const auto& row : y) {
    if (row.size() != k) throw UnbalancedDesign("every subject needs every condition");
  }
  double grand = 0.0;
  std::vector<double> subj(n, 0.0), cond(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      grand += y[i][j];
      subj[i] += y[i][j];
      cond[j] += y[i][j];
    }
  }
  grand /= static_cast<double>(n * k);
  for (auto& v : subj) v /= static_cast<double>(k);
  for (auto& v : cond) v /= static_cast<double>(n);

  double ss_factor = 0.0, ss_error = 0.0;
  for (std::size_t j = 0; j < k; ++j) ss_factor += static_cast<double>(n) * (cond[j] - grand) * (cond[j] - grand);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double e = y[i][j] - subj[i] - cond[j] + grand;
      ss_error += e * e;
    }
  }
  // Rounding leaves residue of order eps * scale; treat it as exact zero.
  double scale = 0.0;
  for (const auto& row : y) {
    for (double v : row) scale = std::max(scale, std::abs(v));
  }
  const double floor = 1e-24 * scale * scale * static_cast<double>(n * k);
  if (ss_factor <= floor) ss_factor = 0.0;
  if (ss_error <= floor) ss_error = 0.0;

  AnovaResult r;
  r.df_factor = static_cast<double>(k - 1);
  r.df_error = static_cast<double>((k - 1) * (n - 1));
  r.ss_factor = ss_factor;
  r.ss_error = ss_error;
  if (ss_factor == 0.0) {
    r.f = 0.0;
    r.p = 1.0;
    r.partial_eta2 = 0.0;
  } else if (ss_error == 0.0) {
    r.f = std::numeric_limits<double>::infinity();
    r.f_infinite = true;
    r.p = 0.0;
    r.partial_eta2 = 1.0;
  } else {
    r.f = (ss_factor / r.df_factor) / (ss_error / r.df_error);
    r.p = f_distribution_sf(r.f, r.df_factor, r.df_error);
    r.partial_eta2 = ss_factor / (ss_factor + ss_error);
  }
  r.magnitude = eta_magnitude(r.partial_eta2);
  return r;
}

PairedT paired_t(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw UnbalancedDesign("paired samples differ in size");
  const std::size_t n = x.size();
  if (n < 2) throw UnbalancedDesign("paired t-test needs at least two pairs");
  std::vector<double> d(n);
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = x[i] - y[i];
    scale = std::max({scale, std::abs(x[i]), std::abs(y[i])});
  }
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : d) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  const double tiny = 1e-12 * scale;
  PairedT r;
  if (std::abs(mean) <= tiny) return r;
  if (sd <= tiny * 1e-3) {
    r.t = mean > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    r.p = 0.0;
    return r;
  }
  r.t = mean / (sd / std::sqrt(static_cast<double>(n)));
  r.p = t_two_sided_p(r.t, static_cast<double>(n - 1));
  return r;
}

std::vector<double> holm_adjust(const std::vector<double>& p) {
  const std::size_t m = p.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  std::vector<double> out(m);
  double running = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    const double adj = std::min(1.0, static_cast<double>(m - r) * p[order[r]]);
    running = std::max(running, adj);
    out[order[r]] = running;
  }
  return out;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw InvalidArgument("quantile of an empty sample");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

} // namespace musclework
