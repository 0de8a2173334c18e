#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace expleval {

/// Ranks starting at 1, ties receiving the average of their positions.
std::vector<double> average_ranks(std::span<const double> x);

struct SpearmanResult {
  double rho = 0.0;
  double p_value = 1.0;
};

/// Spearman rank correlation with a two-sided t-approximation p-value.
/// Needs at least 3 pairs; nullopt when either side is constant.
std::optional<SpearmanResult> spearman(std::span<const double> x, std::span<const double> y);

/// "***", "**", "*" or "" for p below 0.001, 0.01, 0.05.
std::string significance_stars(double p_value);

struct AnovaResult {
  double f = 0.0;
  double p_value = 1.0;
  double df_between = 0.0;
  double df_within = 0.0;
  double ss_between = 0.0;
  double ss_within = 0.0;
};

/// One-way ANOVA. At least two groups of at least two observations each.
AnovaResult one_way_anova(const std::vector<std::vector<double>>& groups);

/// Distribution of the studentized range for k groups and df degrees of
/// freedom (df = infinity allowed). Numerical integration, absolute error
/// well below 1e-8.
double studentized_range_cdf(double q, int k, double df);
double studentized_range_sf(double q, int k, double df);

struct TukeyPair {
  std::size_t i = 0;
  std::size_t j = 0;
  double mean_diff = 0.0;  // mean_i - mean_j
  double q = 0.0;
  double p_value = 1.0;
  bool significant = false;
};

/// Tukey HSD with the Tukey-Kramer adjustment for unequal group sizes. One
/// entry per unordered pair, i < j, in lexicographic order.
std::vector<TukeyPair> tukey_hsd(const std::vector<std::vector<double>>& groups, double alpha = 0.05);

}  // namespace expleval
