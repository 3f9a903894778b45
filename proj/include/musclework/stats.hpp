#pragma once

#include <string>
#include <utility>
#include <vector>

namespace musclework {

/// Upper tail P(X >= f) of the F(d1, d2) distribution.
double f_distribution_sf(double f, double d1, double d2);

/// Two-sided p value of a t statistic with `df` degrees of freedom.
double t_two_sided_p(double t, double df);

struct AnovaResult {
  std::string group;
  double f = 0.0;
  double df_factor = 0.0;
  double df_error = 0.0;
  double p = 1.0;
  double partial_eta2 = 0.0;
  char magnitude = '-'; // 's', 'm', 'l' at 0.01 / 0.06 / 0.14, '-' below
  double ss_factor = 0.0;
  double ss_error = 0.0;
  bool f_infinite = false; // factor variance with zero residual
};

/// One-way repeated-measures ANOVA. `cells[i][j]` is subject i under
/// condition j; every row must have the same length (>= 2) and there must be
/// at least two subjects.
AnovaResult rm_anova_cells(const std::vector<std::vector<double>>& cells);

char eta_magnitude(double partial_eta2);

struct PairedT {
  double t = 0.0;
  double p = 1.0;
};
PairedT paired_t(const std::vector<double>& x, const std::vector<double>& y);

/// Holm step-down adjustment; output in input order, monotone, capped at 1.
std::vector<double> holm_adjust(const std::vector<double>& p);

/// Quantile with linear interpolation between order statistics.
double quantile(std::vector<double> values, double q);

} // namespace musclework
