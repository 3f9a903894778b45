#pragma once

// Independent reference computations used by the unit and acceptance tests.

#include <Eigen/Core>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace mwtest {

struct GridResult {
  Eigen::VectorXd a;
  bool found = false;
};

/// Brute-force minimiser of sum a^2 subject to A a = b on a 0.001 grid.
/// For every choice of (n - rows) free activations the grid is walked over
/// those; the dependent ones follow from the equalities and the point is
/// kept when they lie in [0,1] too. Walking every choice puts optima on a
/// face (some a = 0 or 1) exactly on the grid.
inline GridResult grid_min_effort(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double step = 0.001) {
  const Eigen::Index rows = A.rows(), n = A.cols();
  const Eigen::Index free = n - rows;
  const int steps = static_cast<int>(std::lround(1.0 / step));
  GridResult best;
  double best_cost = std::numeric_limits<double>::infinity();

  std::vector<bool> is_free(static_cast<std::size_t>(n), false);
  std::fill(is_free.begin(), is_free.begin() + free, true);
  do {
    std::vector<Eigen::Index> fi, di;
    for (Eigen::Index m = 0; m < n; ++m) (is_free[static_cast<std::size_t>(m)] ? fi : di).push_back(m);
    Eigen::MatrixXd Af(rows, free), Ad(rows, rows);
    for (Eigen::Index k = 0; k < free; ++k) Af.col(k) = A.col(fi[static_cast<std::size_t>(k)]);
    for (Eigen::Index k = 0; k < rows; ++k) Ad.col(k) = A.col(di[static_cast<std::size_t>(k)]);
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(Ad);
    if (!lu.isInvertible()) continue;
    const Eigen::MatrixXd Ad_inv = lu.inverse();

    std::vector<int> idx(static_cast<std::size_t>(free), 0);
    Eigen::VectorXd af(free), ad(rows), a(n);
    while (true) {
      for (Eigen::Index k = 0; k < free; ++k) af[k] = idx[static_cast<std::size_t>(k)] * step;
      ad = Ad_inv * (b - Af * af);
      bool ok = true;
      for (Eigen::Index k = 0; k < rows; ++k) {
        if (ad[k] < -1e-12 || ad[k] > 1.0 + 1e-12) ok = false;
      }
      if (ok) {
        for (Eigen::Index k = 0; k < free; ++k) a[fi[static_cast<std::size_t>(k)]] = af[k];
        for (Eigen::Index k = 0; k < rows; ++k) a[di[static_cast<std::size_t>(k)]] = ad[k];
        const double cost = a.squaredNorm();
        if (cost < best_cost) {
          best_cost = cost;
          best.a = a;
          best.found = true;
        }
      }
      Eigen::Index k = 0;
      while (k < free && ++idx[static_cast<std::size_t>(k)] > steps) idx[static_cast<std::size_t>(k++)] = 0;
      if (k == free) break;
    }
  } while (std::prev_permutation(is_free.begin(), is_free.end()));
  return best;
}

/// Density of the F(d1, d2) distribution.
inline double f_density(double x, double d1, double d2) {
  if (x <= 0.0) return 0.0;
  const double logc = std::lgamma(0.5 * (d1 + d2)) - std::lgamma(0.5 * d1) - std::lgamma(0.5 * d2) +
                      0.5 * d1 * std::log(d1 / d2);
  return std::exp(logc + (0.5 * d1 - 1.0) * std::log(x) - 0.5 * (d1 + d2) * std::log1p(d1 * x / d2));
}

/// P(X >= f) by composite Simpson on the substitution x = f + u / (1 - u).
inline double f_upper_tail_simpson(double f, double d1, double d2, int intervals = 20000) {
  auto g = [&](double u) {
    if (u >= 1.0) return 0.0;
    const double x = f + u / (1.0 - u);
    return f_density(x, d1, d2) / ((1.0 - u) * (1.0 - u));
  };
  const double h = 1.0 / intervals;
  double s = g(0.0) + g(1.0);
  for (int i = 1; i < intervals; ++i) s += (i % 2 ? 4.0 : 2.0) * g(i * h);
  return s * h / 3.0;
}

inline double sorted_median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n == 0) return 0.0;
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

} // namespace mwtest
