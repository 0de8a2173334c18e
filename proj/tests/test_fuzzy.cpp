#include <gtest/gtest.h>

#include <cmath>

#include "expleval/errors.hpp"
#include "expleval/fuzzy.hpp"

using namespace expleval;

namespace {

FuzzyMappingMatrix single_row(std::vector<int> scores) {
  return build_mapping_matrix(FactorSet{{MetricId::Efficiency}}, {std::move(scores)});
}

Session session_with_likert(ExplanationStyle style, const std::array<int, 6>& scores) {
  Session s;
  s.phase = Phase::Complete;
  for (auto m : kAllMetrics) s.likert.push_back({style, m, scores[index_of(m)]});
  return s;
}

}  // namespace

TEST(MappingMatrix, WorkedExampleProportions) {
  const auto r = single_row({3, 3, 3, 3, 3, 3, 3, 4, 4, 5});
  EXPECT_EQ(r.rows[0], (std::vector<double>{0, 0, 0.7, 0.2, 0.1}));
}

TEST(MappingMatrix, OneHotAndUniformRows) {
  EXPECT_EQ(single_row({5, 5, 5}).rows[0], (std::vector<double>{0, 0, 0, 0, 1}));
  EXPECT_EQ(single_row({1, 2, 3, 4, 5}).rows[0], (std::vector<double>{0.2, 0.2, 0.2, 0.2, 0.2}));
}

TEST(MappingMatrix, EmptyFactorIsNamed) {
  try {
    build_mapping_matrix(FactorSet{{MetricId::Efficiency, MetricId::Trust}}, {{3}, {}});
    FAIL() << "expected an error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("Trust"), std::string::npos);
  }
}

TEST(MappingMatrix, RejectsOutOfRangeScore) {
  EXPECT_THROW(single_row({0}), ValidationError);
  EXPECT_THROW(single_row({6}), ValidationError);
}

TEST(Compose, OneHotSelectsRow) {
  FuzzyMappingMatrix r{{{0.1, 0.2, 0.3, 0.2, 0.2}, {0, 0, 0.7, 0.2, 0.1}}};
  EXPECT_EQ(compose(WeightVector{{0, 1}}, r).e, r.rows[1]);
}

TEST(Compose, ConvexFixedPoint) {
  FuzzyMappingMatrix r{std::vector<std::vector<double>>(6, {0, 0, 1, 0, 0})};
  const auto e = compose(WeightVector::equal(6), r).e;
  for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(e[j], j == 2 ? 1.0 : 0.0, 1e-12);
}

TEST(Compose, HandProduct) {
  FuzzyMappingMatrix r{{{1, 0, 0, 0, 0}, {0, 0, 0, 0, 1}}};
  EXPECT_EQ(compose(WeightVector{{0.5, 0.5}}, r).e, (std::vector<double>{0.5, 0, 0, 0, 0.5}));
}

TEST(Compose, DimensionMismatch) {
  FuzzyMappingMatrix r{{{1, 0, 0, 0, 0}}};
  EXPECT_THROW(compose(WeightVector{{0.5, 0.5}}, r), ValidationError);
}

TEST(Classify, PublishedRows) {
  auto avg = classify(AppraisalVector{{0.1054, 0.1530, 0.3979, 0.2176, 0.1258}});
  EXPECT_EQ(avg.grade, AppraisalGrade::Medium);
  EXPECT_EQ(avg.membership, 0.3979);
  EXPECT_FALSE(avg.tie);
  auto ctx = classify(AppraisalVector{{0.1938, 0.1667, 0.1530, 0.2006, 0.2857}});
  EXPECT_EQ(ctx.grade, AppraisalGrade::VeryGood);
  EXPECT_EQ(ctx.membership, 0.2857);
}

TEST(Classify, TieGoesToHigherGrade) {
  auto c = classify(AppraisalVector{{0.2, 0.2, 0.2, 0.2, 0.2}});
  EXPECT_EQ(c.grade, AppraisalGrade::VeryGood);
  EXPECT_EQ(c.membership, 0.2);
  EXPECT_TRUE(c.tie);
}

TEST(ImpliedMean, Examples) {
  EXPECT_DOUBLE_EQ(implied_mean(AppraisalVector{{0, 0, 1, 0, 0}}), 3.0);
  EXPECT_DOUBLE_EQ(implied_mean(AppraisalVector{{0.5, 0, 0, 0, 0.5}}), 3.0);
  EXPECT_NEAR(implied_mean(AppraisalVector{{0.0442, 0.1292, 0.2142, 0.4217, 0.1904}}), 3.584, 5e-4);
}

TEST(ImpliedMean, RejectsUnnormalized) {
  EXPECT_THROW(implied_mean(AppraisalVector{{0.5, 0, 0, 0, 0.2}}), ValidationError);
}

TEST(Weights, EqualAndValidation) {
  const auto w = WeightVector::equal(6);
  EXPECT_NO_THROW(w.validate());
  EXPECT_THROW((WeightVector{{0.5, 0.6}}.validate()), ValidationError);
  EXPECT_THROW((WeightVector{{1.5, -0.5}}.validate()), ValidationError);
}

TEST(Weights, DocumentNamesMetrics) {
  const auto w = weights_from_document(KvDocument::parse("[weights]\nTrust = 1\n"));
  for (auto m : kAllMetrics) EXPECT_EQ(w.weights[index_of(m)], m == MetricId::Trust ? 1.0 : 0.0);
  EXPECT_THROW(weights_from_document(KvDocument::parse("Trust = 0.5\n")), ValidationError);
  EXPECT_THROW(weights_from_document(KvDocument::parse("Honesty = 1\n")), ValidationError);
}

TEST(EvaluateStyle, AllFoursIsOneHotGood) {
  std::vector<Session> sessions;
  for (int i = 0; i < 5; ++i) sessions.push_back(session_with_likert(ExplanationStyle::Simi, {4, 4, 4, 4, 4, 4}));
  const auto ev = evaluate_style(sessions, ExplanationStyle::Simi, WeightVector::equal(6));
  EXPECT_EQ(ev.classification.grade, AppraisalGrade::Good);
  EXPECT_NEAR(ev.classification.membership, 1.0, 1e-12);
}

TEST(EvaluateStyle, TwoRespondentsSplitThreeAndFive) {
  std::vector<Session> sessions{session_with_likert(ExplanationStyle::Per, {3, 3, 3, 3, 3, 3}),
                                session_with_likert(ExplanationStyle::Per, {5, 5, 5, 5, 5, 5})};
  const auto e = evaluate_style(sessions, ExplanationStyle::Per, WeightVector::equal(6)).e.e;
  const std::vector<double> expected{0, 0, 0.5, 0, 0.5};
  for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(e[j], expected[j], 1e-12);
}

TEST(EvaluateStyle, StyleWithoutAnswersFails) {
  std::vector<Session> sessions{session_with_likert(ExplanationStyle::Per, {3, 3, 3, 3, 3, 3})};
  EXPECT_THROW(evaluate_style(sessions, ExplanationStyle::Avg, WeightVector::equal(6)), ValidationError);
}
