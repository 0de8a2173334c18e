#include "expleval/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include "expleval/errors.hpp"
#include "expleval/recommender.hpp"

namespace expleval {

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double r = (static_cast<double>(i + j) + 2.0) / 2.0;
    for (std::size_t m = i; m <= j; ++m) ranks[order[m]] = r;
    i = j + 1;
  }
  return ranks;
}

std::optional<SpearmanResult> spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ValidationError("spearman: vectors differ in length");
  if (x.size() < 3) throw ValidationError("spearman: needs at least 3 pairs");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const auto r = pearson(rx, ry);
  if (!r) return std::nullopt;
  SpearmanResult out;
  out.rho = std::clamp(*r, -1.0, 1.0);
  if (std::fabs(out.rho) > 1.0 - 1e-12) out.rho = out.rho > 0 ? 1.0 : -1.0;
  const double n = static_cast<double>(x.size());
  const double denom = (1.0 - out.rho) * (1.0 + out.rho);
  if (denom <= 0.0) {
    out.p_value = 0.0;
  } else {
    const double t = out.rho * std::sqrt((n - 2.0) / denom);
    const boost::math::students_t dist(n - 2.0);
    out.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t))));
  }
  return out;
}

std::string significance_stars(double p_value) {
  if (p_value < 0.001) return "***";
  if (p_value < 0.01) return "**";
  if (p_value < 0.05) return "*";
  return "";
}

namespace {

void check_groups(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) throw ValidationError("need at least two groups");
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].size() < 2) {
      throw ValidationError("group " + std::to_string(g) + " has fewer than two observations");
    }
  }
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double within_ss(const std::vector<std::vector<double>>& groups) {
  double ss = 0.0;
  for (const auto& g : groups) {
    const double m = mean_of(g);
    for (double v : g) ss += (v - m) * (v - m);
  }
  return ss;
}

}  // namespace

AnovaResult one_way_anova(const std::vector<std::vector<double>>& groups) {
  check_groups(groups);
  std::size_t n = 0;
  double total = 0.0;
  for (const auto& g : groups) {
    n += g.size();
    total += std::accumulate(g.begin(), g.end(), 0.0);
  }
  const double grand = total / static_cast<double>(n);
  AnovaResult out;
  for (const auto& g : groups) {
    const double d = mean_of(g) - grand;
    out.ss_between += static_cast<double>(g.size()) * d * d;
  }
  out.ss_within = within_ss(groups);
  out.df_between = static_cast<double>(groups.size() - 1);
  out.df_within = static_cast<double>(n - groups.size());
  const double msb = out.ss_between / out.df_between;
  const double msw = out.ss_within / out.df_within;
  // Relative guard: floating-point noise in SSB for equal means must read as 0.
  const double scale = std::max(out.ss_between + out.ss_within, 1e-300);
  if (out.ss_between <= 1e-14 * scale) {
    out.f = 0.0;
    out.p_value = 1.0;
  } else if (out.ss_within <= 1e-14 * scale) {
    out.f = std::numeric_limits<double>::infinity();
    out.p_value = 0.0;
  } else {
    out.f = msb / msw;
    const boost::math::fisher_f dist(out.df_between, out.df_within);
    out.p_value = boost::math::cdf(boost::math::complement(dist, out.f));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Studentized range
// ---------------------------------------------------------------------------

namespace {

using Quad = boost::math::quadrature::gauss<double, 20>;

double phi(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }
double Phi(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// P(range of k standard normals <= w).
double range_cdf(double w, int k) {
  if (w <= 0.0) return 0.0;
  auto f = [&](double z) {
    const double d = Phi(z) - Phi(z - w);
    return phi(z) * std::pow(std::max(d, 0.0), k - 1);
  };
  // Piecewise fixed-order rule over the support of phi.
  double sum = 0.0;
  for (double a = -9.0; a < 9.0; a += 1.5) sum += Quad::integrate(f, a, a + 1.5);
  return std::clamp(static_cast<double>(k) * sum, 0.0, 1.0);
}

}  // namespace

double studentized_range_cdf(double q, int k, double df) {
  if (k < 2) throw ValidationError("studentized range needs k >= 2");
  if (!(df > 0.0)) throw ValidationError("studentized range needs positive degrees of freedom");
  if (q <= 0.0) return 0.0;
  if (std::isinf(q)) return 1.0;
  if (std::isinf(df) || df > 1e6) return range_cdf(q, k);
  // s = sqrt(chi2_df / df); integrate its density against the range cdf.
  const double log_norm = 0.5 * df * std::log(df) - std::lgamma(0.5 * df) - (0.5 * df - 1.0) * std::log(2.0);
  auto density = [&](double s) {
    if (s <= 0.0) return 0.0;
    return std::exp(log_norm + (df - 1.0) * std::log(s) - 0.5 * df * s * s);
  };
  auto f = [&](double s) { return density(s) * range_cdf(q * s, k); };
  const boost::math::chi_squared chi(df);
  const double probs[] = {1e-15, 1e-6, 1e-3, 0.05, 0.25, 0.5, 0.75, 0.95, 0.999, 1.0 - 1e-6};
  std::vector<double> cuts{0.0};
  for (double p : probs) cuts.push_back(std::sqrt(boost::math::quantile(chi, p) / df));
  cuts.push_back(std::sqrt(boost::math::quantile(boost::math::complement(chi, 1e-15)) / df));
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (!(cuts[i + 1] > cuts[i])) continue;
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    sum += Quad::integrate(f, cuts[i], mid) + Quad::integrate(f, mid, cuts[i + 1]);
  }
  return std::clamp(sum, 0.0, 1.0);
}

double studentized_range_sf(double q, int k, double df) { return 1.0 - studentized_range_cdf(q, k, df); }

std::vector<TukeyPair> tukey_hsd(const std::vector<std::vector<double>>& groups, double alpha) {
  check_groups(groups);
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must lie in (0, 1)");
  std::size_t n = 0;
  for (const auto& g : groups) n += g.size();
  const double df = static_cast<double>(n - groups.size());
  const double mse = within_ss(groups) / df;
  const int k = static_cast<int>(groups.size());
  std::vector<TukeyPair> out;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    for (std::size_t j = i + 1; j < groups.size(); ++j) {
      TukeyPair p;
      p.i = i;
      p.j = j;
      p.mean_diff = mean_of(groups[i]) - mean_of(groups[j]);
      const double se =
          std::sqrt(0.5 * mse * (1.0 / static_cast<double>(groups[i].size()) + 1.0 / static_cast<double>(groups[j].size())));
      if (se == 0.0) {
        p.q = p.mean_diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        p.p_value = p.mean_diff == 0.0 ? 1.0 : 0.0;
      } else {
        p.q = std::fabs(p.mean_diff) / se;
        p.p_value = std::clamp(studentized_range_sf(p.q, k, df), 0.0, 1.0);
      }
      p.significant = p.p_value < alpha;
      out.push_back(p);
    }
  }
  return out;
}

}  // namespace expleval
