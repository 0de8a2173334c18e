#include <gtest/gtest.h>

#include "expleval/analytics.hpp"
#include "expleval/errors.hpp"
#include "expleval/simulator.hpp"
#include "expleval/synthetic.hpp"

using namespace expleval;

namespace {

struct Study {
  Dataset ds = synthetic_dataset({});
  RecommenderModel model{ds, RecommenderConfig{}};
  PhraseTable phrases = PhraseTable::defaults();
  StudyContext ctx{ds, model, phrases};
};

const Study& study() {
  static const Study s;
  return s;
}

SimulationProfile dirac() { return load_profile(std::string(EXPLEVAL_SOURCE_DIR) + "/resources/profile_dirac4.json"); }

}  // namespace

TEST(ScoreDistribution, SamplesProportionally) {
  ScoreDistribution d{{{1, 1.0}, {5, 3.0}}};
  Rng rng(4);
  int fives = 0;
  for (int i = 0; i < 4000; ++i) {
    const int s = d.sample(rng);
    ASSERT_TRUE(s == 1 || s == 5);
    fives += s == 5;
  }
  EXPECT_NEAR(fives / 4000.0, 0.75, 0.03);
}

TEST(ScoreDistribution, WithinRestrictsOrFallsBackToUniform) {
  ScoreDistribution d{{{1, 1.0}, {4, 1.0}}};
  Rng rng(1);
  for (int i = 0; i < 200; ++i) EXPECT_EQ(d.sample_within(rng, 2, 5), 4);
  std::set<int> seen;
  for (int i = 0; i < 200; ++i) seen.insert(d.sample_within(rng, 2, 3));
  EXPECT_EQ(seen, (std::set<int>{2, 3}));
}

TEST(Profile, WildcardsAndOverrides) {
  const auto p = profile_from_json(Json::parse(R"({
    "diff": {"*": {"0": 1}, "Avg": {"1": 1}},
    "time_ms": {"*": {"mean": 3000, "sd": 10}},
    "likert": {"*": {"*": {"3": 1}}, "Simi": {"Trust": {"5": 1}}}
  })"));
  EXPECT_EQ(p.diff_for(ExplanationStyle::Avg).weights.at(1), 1.0);
  EXPECT_EQ(p.diff_for(ExplanationStyle::Per).weights.at(0), 1.0);
  EXPECT_EQ(p.time_for(ExplanationStyle::Simu).mean_ms, 3000.0);
  EXPECT_EQ(p.likert_for(ExplanationStyle::Simi, MetricId::Trust).weights.at(5), 1.0);
  EXPECT_EQ(p.likert_for(ExplanationStyle::Simi, MetricId::Efficiency).weights.at(3), 1.0);
  EXPECT_EQ(p.r_for(ExplanationStyle::Avg).weights.size(), 5u);
}

TEST(Profile, InvalidDocumentsRejected) {
  EXPECT_THROW(profile_from_json(Json::parse(R"({"time_ms": {"*": {"mean": 1}}, "likert": {"*": {"*": {"3": 1}}}})")),
               ValidationError);
  EXPECT_THROW(profile_from_json(Json::parse(
                   R"({"diff": {"*": {"9": 1}}, "time_ms": {"*": {"mean": 1}}, "likert": {"*": {"*": {"3": 1}}}})")),
               ValidationError);
  EXPECT_THROW(profile_from_json(Json::parse(
                   R"({"diff": {"*": {"0": -1}}, "time_ms": {"*": {"mean": 1}}, "likert": {"*": {"*": {"3": 1}}}})")),
               ValidationError);
  EXPECT_THROW(profile_from_json(Json::parse(
                   R"({"diff": {"Avg": {"0": 1}}, "time_ms": {"*": {"mean": 1}}, "likert": {"*": {"*": {"3": 1}}}})")),
               ValidationError);
  EXPECT_THROW(profile_from_json(Json::parse(
                   R"({"diff": {"*": {"0": 1}}, "time_ms": {"*": {"mean": 1}}, "likert": {"Bogus": {"*": {"3": 1}}}})")),
               ValidationError);
}

TEST(Simulate, ZeroSessionsIsEmpty) {
  EXPECT_TRUE(simulate(study().ctx, dirac(), {.n_sessions = 0, .seed = 1}).empty());
}

TEST(Simulate, DeterministicForFixedSeed) {
  const auto a = simulate(study().ctx, dirac(), {.n_sessions = 3, .seed = 7});
  const auto b = simulate(study().ctx, dirac(), {.n_sessions = 3, .seed = 7});
  EXPECT_EQ(a, b);
  EXPECT_NE(a, simulate(study().ctx, dirac(), {.n_sessions = 3, .seed = 8}));
}

TEST(Simulate, DiracCohortIsExact) {
  const auto events = simulate(study().ctx, dirac(), {.n_sessions = 4, .seed = 3});
  EXPECT_EQ(events.size(), 4u * 61u);
  const auto sessions = complete_sessions(events);
  ASSERT_EQ(sessions.size(), 4u);
  const auto obj = objective_report(sessions);
  for (const auto& row : obj.rows) {
    EXPECT_EQ(row->mean_time_s, 5.0);
    EXPECT_EQ(row->mean_diff, 0.0);
  }
  const auto subj = subjective_report(sessions);
  for (const auto& row : subj.cells)
    for (const auto& c : row) EXPECT_EQ(c->mean, 4.0);
}

TEST(Simulate, StudyShapedProfileRespectsBounds) {
  const auto p = load_profile(std::string(EXPLEVAL_SOURCE_DIR) + "/resources/profile_study_shaped.json");
  const auto sessions = complete_sessions(simulate(study().ctx, p, {.n_sessions = 20, .seed = 5}));
  ASSERT_EQ(sessions.size(), 20u);
  for (const auto& s : sessions) {
    EXPECT_TRUE(s.is_complete());
    for (const auto& t : s.trials) {
      EXPECT_GE(*t.t_ms, 0);
      EXPECT_LE(*t.t_ms, kMaxDecisionMs);
      EXPECT_LE(std::abs(*t.r - *t.r_prime), 1);
    }
  }
}
