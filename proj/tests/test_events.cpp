#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "expleval/errors.hpp"
#include "expleval/events.hpp"
#include "expleval/synthetic.hpp"

using namespace expleval;
namespace fs = std::filesystem;

namespace {

struct Study {
  Dataset ds = synthetic_dataset({});
  RecommenderModel model{ds, [] {
                           RecommenderConfig c;
                           c.n_clusters = 5;
                           return c;
                         }()};
  PhraseTable phrases = PhraseTable::defaults();
  StudyContext ctx{ds, model, phrases};
};

const Study& study() {
  static const Study s;
  return s;
}

/// Drives one session to completion, returning its events and final state.
std::pair<std::vector<EventRecord>, Session> full_session(const std::string& id, std::uint64_t seed) {
  std::vector<EventRecord> events;
  auto push = [&](const Transition& t) {
    events.push_back({events.size() + 1, t.type, id, t.payload, 1000 + std::int64_t(events.size()), std::nullopt});
    return t.session;
  };
  Session s = push(create_session(study().ds, id, Demographics{"25-34", "f", "msc", "engineer", "weekly"}, seed));
  for (std::size_t i = 0; i < kSeedTaskCount; ++i) s = push(seed_rating(s, i, int(i % 5) + 1, study().ctx));
  for (std::size_t k = 0; k < kTrialCount; ++k) {
    s = push(explanation_rating(s, k, 4, 3000 + std::int64_t(k)));
    s = push(detail_rating(s, k, 3));
  }
  while (auto cell = s.next_likert_cell()) s = push(likert_response(s, cell->first, cell->second, 4));
  return {events, s};
}

fs::path temp_log(const std::string& tag) {
  auto p = fs::temp_directory_path() / ("expleval-events-" + std::to_string(::getpid()) + "-" + tag + ".ndjson");
  fs::remove(p);
  return p;
}

}  // namespace

TEST(EventRecord, SerializeRoundTrip) {
  EventRecord e{7, "likert", "abc", Json{{"style", "Avg"}, {"metric", "Trust"}, {"score", 4}}, 1700000000123, "k-1"};
  const auto line = serialize_event(e);
  EXPECT_EQ(line.find('\n'), std::string::npos);
  EXPECT_EQ(parse_event(line), e);
  e.idempotency_key.reset();
  EXPECT_EQ(parse_event(serialize_event(e)), e);
  EXPECT_THROW(parse_event("{\"seq\": 1"), ValidationError);
}

TEST(Replay, ReproducesSession) {
  const auto [events, final_state] = full_session("s1", 99);
  EXPECT_EQ(events.size(), 61u);
  const auto sessions = replay(events);
  ASSERT_EQ(sessions.size(), 1u);
  EXPECT_EQ(sessions.at("s1"), final_state);
  EXPECT_TRUE(final_state.is_complete());
}

TEST(Replay, SurvivesSerialization) {
  const auto [events, final_state] = full_session("s2", 5);
  std::stringstream buf;
  for (const auto& e : events) buf << serialize_event(e) << '\n';
  const auto parsed = read_event_log(buf);
  EXPECT_EQ(parsed, events);
  EXPECT_EQ(replay(parsed).at("s2"), final_state);
}

TEST(Replay, NeedsNoDataset) {
  const auto [events, final_state] = full_session("s3", 6);
  std::optional<Session> cur;
  for (const auto& e : events) cur = apply_event(cur, e);
  EXPECT_EQ(*cur, final_state);
}

TEST(Replay, InterleavedSessionsAndCompleteFilter) {
  auto [a, sa] = full_session("a", 1);
  auto [b, sb] = full_session("b", 2);
  b.resize(20);
  std::vector<EventRecord> mixed;
  for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
    if (i < b.size()) mixed.push_back(b[i]);
    if (i < a.size()) mixed.push_back(a[i]);
  }
  const auto sessions = replay(mixed);
  EXPECT_EQ(sessions.size(), 2u);
  EXPECT_EQ(sessions.at("b").phase, Phase::Trials);
  const auto done = complete_sessions(mixed);
  ASSERT_EQ(done.size(), 1u);
  EXPECT_EQ(done[0], sa);
}

TEST(Replay, RejectsGapsAndOrphans) {
  auto [events, _] = full_session("g", 3);
  auto gap = events;
  gap.erase(gap.begin() + 5);
  EXPECT_THROW(replay(gap), ValidationError);
  std::vector<EventRecord> orphan(events.begin() + 1, events.begin() + 2);
  orphan[0].seq = 1;
  EXPECT_THROW(replay(orphan), StateError);
}

TEST(Replay, RejectsTamperedTrialIdentity) {
  auto [events, _] = full_session("t", 4);
  for (auto& e : events) {
    if (e.type == event_type::kExplanationRating) {
      e.payload["style"] = e.payload["style"] == "Avg" ? "Per" : "Avg";
      break;
    }
  }
  EXPECT_THROW(replay(events), ValidationError);
}

TEST(EventLogFile, AppendAndRecover) {
  const auto path = temp_log("append");
  const auto [events, final_state] = full_session("f", 8);
  {
    EventLogFile log(path);
    EXPECT_TRUE(log.recovered().empty());
    for (const auto& e : events) log.append(e);
  }
  EventLogFile reopened(path);
  EXPECT_EQ(reopened.recovered(), events);
  EXPECT_EQ(replay(reopened.recovered()).at("f"), final_state);
  fs::remove(path);
}

TEST(EventLogFile, TruncatesTornLastLine) {
  const auto path = temp_log("torn");
  const auto [events, _] = full_session("f", 8);
  {
    EventLogFile log(path);
    for (std::size_t i = 0; i < 10; ++i) log.append(events[i]);
  }
  {
    std::ofstream out(path, std::ios::app);
    out << serialize_event(events[10]).substr(0, 25);
  }
  {
    EventLogFile log(path);
    EXPECT_EQ(log.recovered().size(), 10u);
    log.append(events[10]);
  }
  EXPECT_EQ(read_event_log(path).size(), 11u);
  fs::remove(path);
}
