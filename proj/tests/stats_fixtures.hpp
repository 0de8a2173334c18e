#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

// Reference values from tests/oracles/stats_oracles.py (scipy).
namespace stats_fixtures {

using Groups = std::vector<std::vector<double>>;

// Rank = (#smaller) + (#equal + 1) / 2, computed pairwise.
inline std::vector<double> brute_ranks(const std::vector<double>& x) {
  std::vector<double> r;
  for (double a : x) {
    double less = 0, equal = 0;
    for (double b : x) {
      if (b < a) ++less;
      if (b == a) ++equal;
    }
    r.push_back(less + (equal + 1.0) / 2.0);
  }
  return r;
}

inline double brute_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

struct SpearmanCase {
  std::vector<double> x, y;
  double rho, p;
};

inline const std::vector<SpearmanCase> kSpearman = {
    {{1, 2, 2, 3, 4, 4, 4, 5}, {2, 1, 3, 3, 5, 4, 4, 6}, 0.9256265453136692, 0.0009719602101529901},
    {{10, 20, 30, 40, 50}, {1.5, 3.2, 2.1, 4.8, 4.0}, 0.7999999999999999, 0.10408803866182788},
    {{1, 2, 3, 4, 5, 6, 7}, {7.1, 6.0, 6.5, 4.0, 3.3, 3.9, 1.0}, -0.9285714285714288, 0.0025194724037946874},
    {{3, 4, 2, 5, 4, 3, 1, 2, 4, 5, 3, 3}, {2, 4, 2, 4, 5, 3, 2, 1, 3, 5, 4, 2}, 0.8166666666666667,
     0.0011883078996354033},
    {{0.3, 1.7, -0.4, 2.2, 0.9, 1.1, -1.3, 0.0, 0.5, 2.9}, {1, 0, 1, 2, 0, 1, 2, 0, 1, 1}, -0.07237468644557458,
     0.8425070635827293},
};

struct TukeyRef {
  std::size_t i, j;
  double diff, p;
};

struct AnovaCase {
  Groups groups;
  double f, p;
  std::vector<TukeyRef> tukey;
};

inline const std::vector<AnovaCase> kAnova = {
    {{{6, 8, 4, 5, 3, 4}, {8, 12, 9, 11, 6, 8}, {13, 9, 11, 8, 7, 12}},
     9.264705882352942,
     0.0023987773293929083,
     {{0, 1, -4.0, 0.013913287267276475}, {0, 2, -5.0, 0.0027321219673726027}, {1, 2, -1.0, 0.7006599385323459}}},
    {{{2.1, 3.4, 1.9, 2.8}, {3.3, 4.1, 3.9}, {1.2, 2.2, 1.7, 1.1, 2.0}, {2.9, 3.1}},
     11.058741488227065,
     0.001620383934764805,
     {{0, 1, -1.2166666666666663, 0.04988506727775077},
      {0, 2, 0.9099999999999997, 0.10198669676439953},
      {0, 3, -0.4500000000000002, 0.7537875894699395},
      {1, 2, 2.126666666666666, 0.0010934248133148694},
      {1, 3, 0.7666666666666662, 0.414032932971361},
      {2, 3, -1.3599999999999999, 0.04516599618767436}}},
    {{{3, 4, 3, 2, 4, 3, 3, 5},
      {4, 4, 5, 3, 4, 4, 5, 4},
      {2, 3, 3, 2, 1, 3, 2, 3},
      {3, 3, 4, 3, 3, 2, 4, 3},
      {5, 4, 4, 5, 3, 4, 5, 5},
      {3, 2, 3, 4, 3, 3, 2, 3}},
     8.683146067415729,
     1.0249166252631395e-05,
     {{0, 1, -0.75, 0.32698016209373004},   {0, 2, 1.0, 0.08682958398033258},
      {0, 3, 0.25, 0.9824532763973419},     {0, 4, -1.0, 0.08682958398033258},
      {0, 5, 0.5, 0.7419798672970352},      {1, 2, 1.75, 0.0002710549599074241},
      {1, 3, 1.0, 0.08682958398033258},     {1, 4, -0.25, 0.9824532763973419},
      {1, 5, 1.25, 0.015862384255917017},   {2, 3, -0.75, 0.32698016209373004},
      {2, 4, -2.0, 2.9758165657978175e-05}, {2, 5, -0.5, 0.7419798672970352},
      {3, 4, -1.25, 0.015862384255917017},  {3, 5, 0.25, 0.9824532763973419},
      {4, 5, 1.5, 0.0022481746184338514}}},
    {{{10.0, 10.5, 9.8, 10.2}, {10.1, 10.4, 9.9, 10.6}},
     0.3363228699551575,
     0.5830652148599863,
     {{0, 1, -0.125, 0.5830652148599866}}},
    {{{1, 9, 5, 3}, {2, 8, 4, 6}, {7, 3, 5, 5}, {0, 10, 4, 6}, {5, 5, 5, 6}},
     0.038876889848812095,
     0.9967901718382336,
     {{0, 1, -0.5, 0.998962285485862},
      {0, 2, -0.5, 0.998962285485862},
      {0, 3, -0.5, 0.998962285485862},
      {0, 4, -0.75, 0.9949880570002722},
      {1, 2, 0.0, 1.0},
      {1, 3, 0.0, 1.0},
      {1, 4, -0.25, 0.9999332654804906},
      {2, 3, 0.0, 1.0},
      {2, 4, -0.25, 0.9999332654804906},
      {3, 4, -0.25, 0.9999332654804906}}},
};

}  // namespace stats_fixtures
