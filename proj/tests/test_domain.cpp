#include <gtest/gtest.h>

#include "expleval/domain.hpp"
#include "expleval/errors.hpp"
#include "expleval/kv_document.hpp"

using namespace expleval;

TEST(GradeOfScore, OrdinalIdentity) {
  EXPECT_EQ(grade_of_score(1), AppraisalGrade::VeryPoor);
  EXPECT_EQ(grade_of_score(3), AppraisalGrade::Medium);
  EXPECT_EQ(grade_of_score(5), AppraisalGrade::VeryGood);
  for (int s = 1; s <= 5; ++s) EXPECT_EQ(ordinal(grade_of_score(s)), s);
}

TEST(GradeOfScore, RejectsOutOfRange) {
  EXPECT_THROW(grade_of_score(0), ValidationError);
  EXPECT_THROW(grade_of_score(6), ValidationError);
}

TEST(Enumerations, RoundTripThroughNames) {
  for (auto s : kAllStyles) EXPECT_EQ(parse_style(to_string(s)), s);
  for (auto m : kAllMetrics) EXPECT_EQ(parse_metric(to_string(m)), m);
  for (auto f : kStudyFactors) EXPECT_EQ(parse_study_factor(to_string(f)), f);
  for (std::size_t i = 0; i < kAllStyles.size(); ++i) EXPECT_EQ(index_of(kAllStyles[i]), i);
  EXPECT_THROW(parse_style("Sideways"), ValidationError);
  EXPECT_EQ(display_name(ExplanationStyle::ContextAware), "Context-aware");
  EXPECT_EQ(display_name(AppraisalGrade::VeryGood), "Very good");
}

TEST(Situation, StructuralEqualityAndCompleteness) {
  ContextualSituation a{{StudyFactor::Mood, "positive"}, {StudyFactor::Weather, "sunny"}};
  ContextualSituation b;
  b.assign(StudyFactor::Weather, "sunny");
  b.assign(StudyFactor::Mood, "positive");
  EXPECT_EQ(a, b);
  EXPECT_FALSE(a.is_complete());
  b.assign(StudyFactor::Location, "home");
  b.assign(StudyFactor::PhysicalWellness, "ill");
  EXPECT_TRUE(b.is_complete());
  b.clear(StudyFactor::Mood);
  EXPECT_FALSE(b.has(StudyFactor::Mood));
}

TEST(Situation, ValidatesAgainstSchema) {
  const auto schema = default_study_factors();
  EXPECT_NO_THROW((ContextualSituation{{StudyFactor::Location, "friends_house"}}.validate_against(schema)));
  EXPECT_THROW((ContextualSituation{{StudyFactor::Location, "moon"}}.validate_against(schema)), ValidationError);
}

TEST(Factor, VocabularyValidation) {
  EXPECT_THROW((ContextualFactor{StudyFactor::Mood, {}}.validate()), ValidationError);
  EXPECT_THROW((ContextualFactor{StudyFactor::Mood, {"a", "a"}}.validate()), ValidationError);
  EXPECT_TRUE((ContextualFactor{StudyFactor::Mood, {"a", "b"}}.contains("b")));
}

TEST(KvDocument, SectionsCommentsAndLists) {
  const auto doc = KvDocument::parse("top = 1\n# comment\n[a]\nx = one, two ,,three\n; more\n[b]\ny=2\n");
  EXPECT_EQ(doc.get("", "top"), "1");
  EXPECT_EQ(split_list(*doc.get("a", "x")), (std::vector<std::string>{"one", "two", "three"}));
  EXPECT_TRUE(doc.has_section("b"));
  EXPECT_FALSE(doc.get("b", "x").has_value());
  EXPECT_EQ(doc.entries("b").size(), 1u);
}
