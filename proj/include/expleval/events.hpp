#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "expleval/json_io.hpp"
#include "expleval/protocol.hpp"

namespace expleval {

void to_json(Json& j, const Explanation& e);
void from_json(const Json& j, Explanation& e);
void to_json(Json& j, const TrialRecord& t);
void from_json(const Json& j, TrialRecord& t);
void to_json(Json& j, const Session& s);
void from_json(const Json& j, Session& s);

namespace event_type {
inline constexpr std::string_view kSessionCreated = "session_created";
inline constexpr std::string_view kSeedRating = "seed_rating";
inline constexpr std::string_view kExplanationRating = "explanation_rating";
inline constexpr std::string_view kDetailRating = "detail_rating";
inline constexpr std::string_view kLikert = "likert";
}  // namespace event_type

/// One line of the append-only session log.
struct EventRecord {
  std::uint64_t seq = 0;  // per session, starting at 1
  std::string type;
  std::string session_id;
  Json payload;
  std::int64_t server_ts_ms = 0;
  std::optional<std::string> idempotency_key;

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

/// Compact single-line JSON with a fixed field order.
std::string serialize_event(const EventRecord& e);
EventRecord parse_event(std::string_view line);

/// A protocol step: the resulting session and the payload of the event that
/// records it.
struct Transition {
  Session session;
  std::string type;
  Json payload;
};

Transition create_session(const Dataset& ds, std::string session_id, Demographics participant, std::uint64_t rng_seed);
Transition seed_rating(const Session& s, std::size_t task_index, int score, const StudyContext& ctx);
Transition explanation_rating(const Session& s, std::size_t trial_index, int r, std::int64_t t_ms);
Transition detail_rating(const Session& s, std::size_t trial_index, int r_prime);
Transition likert_response(const Session& s, ExplanationStyle style, MetricId metric, int score);

/// Folds one event into the session it belongs to. Needs no dataset: every
/// derived value is carried in the payloads.
Session apply_event(const std::optional<Session>& current, const EventRecord& e);

/// Replays a log into sessions keyed by id. Sequence numbers must be
/// contiguous per session.
std::map<std::string, Session> replay(std::span<const EventRecord> events);

/// Sessions whose phase is Complete, in id order.
std::vector<Session> complete_sessions(std::span<const EventRecord> events);

std::vector<EventRecord> read_event_log(std::istream& in);
std::vector<EventRecord> read_event_log(const std::filesystem::path& path);

/// Append-only, fsync-on-append event log file. A torn final line left by a
/// crash is truncated on open.
class EventLogFile {
 public:
  explicit EventLogFile(std::filesystem::path path);
  ~EventLogFile();
  EventLogFile(const EventLogFile&) = delete;
  EventLogFile& operator=(const EventLogFile&) = delete;

  /// Records present when the file was opened.
  const std::vector<EventRecord>& recovered() const { return recovered_; }
  /// Writes one line and fsyncs before returning.
  void append(const EventRecord& e);
  /// Current file contents.
  std::string contents() const;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  int fd_ = -1;
  std::vector<EventRecord> recovered_;
  mutable std::mutex mutex_;
};

}  // namespace expleval
