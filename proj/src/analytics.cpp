#include "expleval/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "expleval/errors.hpp"

namespace expleval {

std::string_view persuasiveness_label(double mean_diff) {
  if (mean_diff > 0.0) return "positive";
  if (mean_diff < 0.0) return "negative";
  return "neutral";
}

ObjectiveReport objective_report(std::span<const Session> sessions) {
  struct Acc {
    double time_ms = 0.0, diff = 0.0, abs_diff = 0.0;
    std::size_t n = 0;
  };
  std::array<Acc, kAllStyles.size()> acc{};
  for (const auto& s : sessions) {
    for (const auto& t : s.trials) {
      if (!t.complete()) continue;
      auto& a = acc[index_of(t.style)];
      const int d = *t.r - *t.r_prime;
      a.time_ms += static_cast<double>(*t.t_ms);
      a.diff += d;
      a.abs_diff += std::abs(d);
      ++a.n;
    }
  }
  ObjectiveReport out;
  for (std::size_t i = 0; i < acc.size(); ++i) {
    if (acc[i].n == 0) continue;
    const double n = static_cast<double>(acc[i].n);
    out.rows[i] = ObjectiveRow{acc[i].time_ms / n / 1000.0, acc[i].diff / n, acc[i].abs_diff / n, acc[i].n};
  }
  return out;
}

SubjectiveReport subjective_report(std::span<const Session> sessions) {
  std::array<std::array<std::pair<long long, std::size_t>, kAllMetrics.size()>, kAllStyles.size()> acc{};
  for (const auto& s : sessions) {
    for (const auto& l : s.likert) {
      auto& a = acc[index_of(l.style)][index_of(l.metric)];
      a.first += l.score;
      ++a.second;
    }
  }
  SubjectiveReport out;
  for (std::size_t i = 0; i < acc.size(); ++i) {
    for (std::size_t j = 0; j < acc[i].size(); ++j) {
      const auto [sum, n] = acc[i][j];
      if (n) out.cells[i][j] = SubjectiveCell{static_cast<double>(sum) / static_cast<double>(n), n};
    }
  }
  return out;
}

CorrelationMatrix correlation_matrix(std::span<const Session> sessions, ExplanationStyle style,
                                     bool include_objective) {
  CorrelationMatrix out;
  out.style = style;
  for (auto m : kAllMetrics) out.variables.emplace_back(to_string(m));
  if (include_objective) {
    out.variables.emplace_back("DecisionTime");
    out.variables.emplace_back("RatingDifference");
  }
  const std::size_t v = out.variables.size();
  // One observation per session that answered every variable for the style.
  std::vector<std::vector<double>> columns(v);
  for (const auto& s : sessions) {
    std::vector<std::optional<double>> row(v);
    for (const auto& l : s.likert) {
      if (l.style == style) row[index_of(l.metric)] = l.score;
    }
    if (include_objective) {
      for (const auto& t : s.trials) {
        if (t.style == style && t.complete()) {
          row[kAllMetrics.size()] = static_cast<double>(*t.t_ms) / 1000.0;
          row[kAllMetrics.size() + 1] = *t.r - *t.r_prime;
        }
      }
    }
    if (std::all_of(row.begin(), row.end(), [](const auto& x) { return x.has_value(); })) {
      for (std::size_t k = 0; k < v; ++k) columns[k].push_back(*row[k]);
    }
  }
  out.n = columns.empty() ? 0 : columns.front().size();
  out.cells.assign(v, std::vector<std::optional<SpearmanResult>>(v));
  if (out.n < 3) return out;
  for (std::size_t a = 0; a < v; ++a) {
    for (std::size_t b = a; b < v; ++b) {
      auto r = spearman(columns[a], columns[b]);
      if (r && a == b) *r = SpearmanResult{1.0, 0.0};
      out.cells[a][b] = r;
      out.cells[b][a] = r;
    }
  }
  return out;
}

std::string_view to_string(Granularity g) {
  return g == Granularity::PerTrial ? "per-trial" : "per-participant";
}

namespace {

// values[style] -> list of (session index, value)
using Observations = std::array<std::vector<std::pair<std::size_t, double>>, kAllStyles.size()>;

SignificanceTest run_test(const std::string& measure, Granularity g, const Observations& obs, double alpha) {
  SignificanceTest t;
  t.measure = measure;
  t.granularity = g;
  std::vector<std::vector<double>> groups;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    std::vector<double> values;
    if (g == Granularity::PerTrial) {
      for (const auto& [session, v] : obs[i]) values.push_back(v);
    } else {
      std::map<std::size_t, std::pair<double, std::size_t>> by_session;
      for (const auto& [session, v] : obs[i]) {
        by_session[session].first += v;
        ++by_session[session].second;
      }
      for (const auto& [session, sn] : by_session) values.push_back(sn.first / static_cast<double>(sn.second));
    }
    if (values.size() < 2) continue;
    t.styles.push_back(kAllStyles[i]);
    groups.push_back(std::move(values));
  }
  if (groups.size() < 2) return t;
  t.anova = one_way_anova(groups);
  t.tukey = tukey_hsd(groups, alpha);
  // Report Tukey pairs in terms of style indices.
  for (auto& p : t.tukey) {
    p.i = index_of(t.styles[p.i]);
    p.j = index_of(t.styles[p.j]);
  }
  return t;
}

}  // namespace

std::vector<SignificanceTest> significance_tests(std::span<const Session> sessions, double alpha) {
  Observations time_s, diff;
  std::array<Observations, kAllMetrics.size()> likert;
  for (std::size_t si = 0; si < sessions.size(); ++si) {
    for (const auto& t : sessions[si].trials) {
      if (!t.complete()) continue;
      time_s[index_of(t.style)].emplace_back(si, static_cast<double>(*t.t_ms) / 1000.0);
      diff[index_of(t.style)].emplace_back(si, static_cast<double>(*t.r - *t.r_prime));
    }
    for (const auto& l : sessions[si].likert) {
      likert[index_of(l.metric)][index_of(l.style)].emplace_back(si, l.score);
    }
  }
  std::vector<SignificanceTest> out;
  for (auto g : {Granularity::PerTrial, Granularity::PerParticipant}) {
    out.push_back(run_test("DecisionTime", g, time_s, alpha));
    out.push_back(run_test("RatingDifference", g, diff, alpha));
    for (auto m : kAllMetrics) out.push_back(run_test(std::string(to_string(m)), g, likert[index_of(m)], alpha));
  }
  return out;
}

}  // namespace expleval
