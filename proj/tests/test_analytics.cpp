#include <gtest/gtest.h>

#include "expleval/analytics.hpp"
#include "expleval/errors.hpp"
#include "expleval/reports.hpp"

using namespace expleval;

namespace {

TrialRecord trial(ExplanationStyle style, int r, std::int64_t t_ms, int r_prime) {
  TrialRecord t;
  t.style = style;
  t.movie_id = "m" + std::to_string(index_of(style));
  t.explanation = Explanation{style, "text", {}};
  t.r = r;
  t.t_ms = t_ms;
  t.r_prime = r_prime;
  return t;
}

Session session_with(std::vector<TrialRecord> trials, std::vector<LikertResponse> likert = {}) {
  Session s;
  s.session_id = "s";
  s.phase = Phase::Complete;
  s.trials = std::move(trials);
  s.likert = std::move(likert);
  return s;
}

/// Likert responses for one style with the given per-metric scores.
std::vector<LikertResponse> answers(ExplanationStyle style, const std::array<int, 6>& scores) {
  std::vector<LikertResponse> out;
  for (auto m : kAllMetrics) out.push_back({style, m, scores[index_of(m)]});
  return out;
}

const std::vector<std::vector<double>> kTimes{{4.78, 5.10, 3.95}, {6.20, 5.85, 7.10}, {3.30, 2.95, 4.05},
                                              {5.00, 5.60, 4.40}, {6.90, 7.45, 6.15}, {4.10, 3.80, 5.25}};

std::vector<Session> timed_cohort() {
  std::vector<Session> out;
  for (std::size_t s = 0; s < 3; ++s) {
    std::vector<TrialRecord> trials;
    for (auto style : kAllStyles) {
      trials.push_back(trial(style, 4, std::llround(kTimes[index_of(style)][s] * 1000), 4));
    }
    out.push_back(session_with(trials));
  }
  return out;
}

}  // namespace

TEST(Objective, EqualRatingsGiveZeroDiff) {
  std::vector<TrialRecord> trials;
  for (auto style : kAllStyles) trials.push_back(trial(style, 3, 1000, 3));
  const std::vector<Session> sessions{session_with(trials)};
  const auto rep = objective_report(sessions);
  for (const auto& row : rep.rows) {
    ASSERT_TRUE(row.has_value());
    EXPECT_EQ(row->mean_diff, 0.0);
  }
}

TEST(Objective, SecondsAndAbsoluteDifference) {
  const std::vector<Session> sessions{
      session_with({trial(ExplanationStyle::Avg, 4, 4780, 4), trial(ExplanationStyle::Per, 5, 2000, 4)}),
      session_with({trial(ExplanationStyle::Per, 3, 4000, 4)})};
  const auto rep = objective_report(sessions);
  EXPECT_DOUBLE_EQ(rep.rows[index_of(ExplanationStyle::Avg)]->mean_time_s, 4.78);
  const auto& per = *rep.rows[index_of(ExplanationStyle::Per)];
  EXPECT_EQ(per.mean_diff, 0.0);
  EXPECT_EQ(per.mean_abs_diff, 1.0);
  EXPECT_EQ(per.n_trials, 2u);
  EXPECT_FALSE(rep.rows[index_of(ExplanationStyle::Simu)].has_value());
  EXPECT_EQ(persuasiveness_label(0.3), "positive");
  EXPECT_EQ(persuasiveness_label(-0.3), "negative");
  EXPECT_EQ(persuasiveness_label(0.0), "neutral");
}

TEST(Objective, IncompleteTrialsIgnored) {
  auto t = trial(ExplanationStyle::Avg, 4, 1000, 4);
  t.r_prime.reset();
  const std::vector<Session> sessions{session_with({t})};
  EXPECT_FALSE(objective_report(sessions).rows[0].has_value());
}

TEST(Subjective, MeansPerCell) {
  const std::vector<Session> sessions{session_with({}, answers(ExplanationStyle::Simi, {3, 4, 4, 4, 4, 4})),
                                      session_with({}, answers(ExplanationStyle::Simi, {4, 4, 4, 4, 4, 4}))};
  const auto rep = subjective_report(sessions);
  const auto& row = rep.cells[index_of(ExplanationStyle::Simi)];
  EXPECT_DOUBLE_EQ(row[0]->mean, 3.5);
  EXPECT_DOUBLE_EQ(row[1]->mean, 4.0);
  EXPECT_EQ(row[0]->n, 2u);
  EXPECT_FALSE(rep.cells[index_of(ExplanationStyle::Avg)][0].has_value());
}

TEST(Subjective, CohortMatchingPublishedSimiRow) {
  // 100 participants; metric m gets `fours[m]` fours and threes otherwise.
  const std::array<int, 6> fours{72, 47, 52, 50, 53, 42};
  std::vector<Session> sessions;
  for (int p = 0; p < 100; ++p) {
    std::array<int, 6> scores{};
    for (std::size_t m = 0; m < 6; ++m) scores[m] = p < fours[m] ? 4 : 3;
    sessions.push_back(session_with({}, answers(ExplanationStyle::Simi, scores)));
  }
  const auto row = subjective_report(sessions).cells[index_of(ExplanationStyle::Simi)];
  const std::array<double, 6> expected{3.72, 3.47, 3.52, 3.50, 3.53, 3.42};
  for (std::size_t m = 0; m < 6; ++m) EXPECT_NEAR(row[m]->mean, expected[m], 1e-12);
}

TEST(Correlation, OracleSymmetryAndDiagonal) {
  const std::vector<int> eff{1, 2, 3, 4, 5, 3, 2, 4}, trust{2, 2, 3, 5, 4, 3, 1, 5};
  const std::vector<double> time_s{3.1, 4.0, 2.2, 5.5, 6.0, 3.3, 2.9, 4.4};
  std::vector<Session> sessions;
  for (std::size_t i = 0; i < eff.size(); ++i) {
    std::array<int, 6> scores{eff[i], int(i % 5) + 1, int((i * 3) % 5) + 1, int((i * 2) % 5) + 1, trust[i],
                              int((7 - i) % 5) + 1};
    sessions.push_back(session_with({trial(ExplanationStyle::ContextAware, 4, std::llround(time_s[i] * 1000), 3)},
                                    answers(ExplanationStyle::ContextAware, scores)));
  }
  const auto m = correlation_matrix(sessions, ExplanationStyle::ContextAware, true);
  EXPECT_EQ(m.n, 8u);
  ASSERT_EQ(m.variables.size(), 8u);
  const auto trust_i = index_of(MetricId::Trust);
  EXPECT_NEAR(m.cells[0][trust_i]->rho, 0.8703703703703702, 1e-12);
  EXPECT_NEAR(m.cells[0][trust_i]->p_value, 0.004929973444580152, 1e-9);
  EXPECT_NEAR(m.cells[0][6]->rho, 0.7152697513290863, 1e-12);
  EXPECT_NEAR(m.cells[0][6]->p_value, 0.04608686981383742, 1e-9);
  for (std::size_t i = 0; i < m.variables.size(); ++i) {
    if (m.cells[i][i]) EXPECT_EQ(m.cells[i][i]->rho, 1.0);
    for (std::size_t j = 0; j < m.variables.size(); ++j) {
      ASSERT_EQ(m.cells[i][j].has_value(), m.cells[j][i].has_value());
      if (m.cells[i][j]) EXPECT_NEAR(m.cells[i][j]->rho, m.cells[j][i]->rho, 1e-12);
    }
  }
  // r - r' is constant in this cohort
  EXPECT_FALSE(m.cells[0][7].has_value());
}

TEST(Correlation, TooFewSessions) {
  const std::vector<Session> sessions{session_with({}, answers(ExplanationStyle::Avg, {1, 2, 3, 4, 5, 1})),
                                      session_with({}, answers(ExplanationStyle::Avg, {2, 3, 4, 5, 1, 2}))};
  const auto m = correlation_matrix(sessions, ExplanationStyle::Avg);
  EXPECT_EQ(m.n, 2u);
  for (const auto& row : m.cells)
    for (const auto& c : row) EXPECT_FALSE(c.has_value());
}

TEST(Significance, DecisionTimeMatchesOracle) {
  const auto tests = significance_tests(timed_cohort());
  const auto it = std::find_if(tests.begin(), tests.end(), [](const SignificanceTest& t) {
    return t.measure == "DecisionTime" && t.granularity == Granularity::PerTrial;
  });
  ASSERT_NE(it, tests.end());
  ASSERT_TRUE(it->anova.has_value());
  EXPECT_NEAR(it->anova->f, 12.0104385833933, 1e-9);
  EXPECT_NEAR(it->anova->p_value, 0.00024841722521571605, 1e-9);
  auto pair_p = [&](ExplanationStyle a, ExplanationStyle b) {
    for (const auto& p : it->tukey)
      if (p.i == index_of(a) && p.j == index_of(b)) return p.p_value;
    ADD_FAILURE() << "pair missing";
    return -1.0;
  };
  EXPECT_NEAR(pair_p(ExplanationStyle::Avg, ExplanationStyle::Per), 0.047072190212188225, 1e-6);
  EXPECT_NEAR(pair_p(ExplanationStyle::Simu, ExplanationStyle::Content), 0.0003229109537831176, 1e-6);
}

TEST(Significance, GranularitiesAndSkippedMeasures) {
  const auto tests = significance_tests(timed_cohort());
  EXPECT_EQ(tests.size(), 16u);
  for (const auto& t : tests) {
    if (t.measure == "DecisionTime") {
      EXPECT_EQ(t.styles.size(), 6u);
      EXPECT_GE(t.anova->f, 0.0);
    }
    if (t.measure == "Trust") EXPECT_FALSE(t.anova.has_value());
    if (t.measure == "RatingDifference") EXPECT_EQ(t.anova->f, 0.0);
  }
}

TEST(Reports, TextAndJsonShapes) {
  const auto sessions = timed_cohort();
  ReportOptions opts;
  const auto text = render_report(ReportKind::Objective, sessions, opts);
  EXPECT_EQ(text.rfind("Table 3:", 0), 0u);
  EXPECT_NE(text.find("4.61"), std::string::npos);
  opts.format = ReportFormat::Json;
  const auto j = Json::parse(render_report(ReportKind::Objective, sessions, opts));
  EXPECT_FALSE(j.empty());
  EXPECT_EQ(render_report(ReportKind::Objective, sessions, opts), render_report(ReportKind::Objective, sessions, opts));
}

TEST(Reports, EmptyInputAndTableNames) {
  EXPECT_THROW(render_report(ReportKind::Subjective, std::span<const Session>{}, ReportOptions{}), InsufficientDataError);
  EXPECT_EQ(report_kind_of_table("3"), ReportKind::Objective);
  EXPECT_EQ(report_kind_of_table("6"), ReportKind::Fuzzy);
  EXPECT_EQ(report_kind_of_table("anova"), ReportKind::Significance);
  EXPECT_THROW(report_kind_of_table("9"), ValidationError);
}
