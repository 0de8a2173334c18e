#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "expleval/events.hpp"
#include "expleval/fuzzy.hpp"
#include "expleval/reports.hpp"

namespace expleval {

/// Settings read from EXPLEVAL_* environment variables.
struct ServiceConfig {
  std::optional<std::filesystem::path> ratings;  // built-in synthetic dataset when absent
  std::optional<std::filesystem::path> catalog;
  std::optional<std::filesystem::path> schema;
  std::optional<std::filesystem::path> recommender_config;
  std::optional<std::filesystem::path> phrases;
  std::optional<std::filesystem::path> weights;
  std::filesystem::path event_log = "expleval-events.ndjson";
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::uint64_t seed_base = 1;
  /// Test hooks: sequential session ids derived from seed_base, and a frozen
  /// server clock.
  bool deterministic_ids = false;
  std::optional<std::int64_t> fixed_clock_ms;

  /// Reads variables through `getenv` (injectable for tests).
  static ServiceConfig from_env(const std::function<const char*(const char*)>& getenv = nullptr);
};

/// A response independent of the HTTP library.
struct ServiceResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// Sessions, the durable event log and the recommender artifacts. Every write
/// is appended and fsynced before it is acknowledged; snapshots are rebuilt by
/// replaying the log at startup.
class SessionStore {
 public:
  SessionStore(Dataset dataset, RecommenderConfig recommender, PhraseTable phrases, std::filesystem::path event_log,
               std::uint64_t seed_base, bool deterministic_ids = false,
               std::optional<std::int64_t> fixed_clock_ms = std::nullopt);
  SessionStore(const SessionStore&) = delete;
  SessionStore& operator=(const SessionStore&) = delete;

  StudyContext context() const { return {dataset_, model_, phrases_}; }

  /// The session as created; `replayed` when the idempotency key was seen before.
  struct Created {
    Session session;
    bool replayed = false;
  };
  Created create(const Demographics& d, const std::optional<std::string>& idempotency_key);

  /// Applies one write. `step` maps the current snapshot to a transition; it
  /// runs under the session's write lock. The ack is stable under replays of
  /// the same idempotency key.
  Json write(const std::string& session_id, const std::optional<std::string>& idempotency_key,
             const std::function<Transition(const Session&)>& step);

  Session snapshot(const std::string& session_id) const;
  std::vector<Session> complete_sessions() const;
  std::size_t session_count() const;
  /// Events in log order, serialized exactly as on disk.
  std::string export_ndjson() const;

 private:
  struct Entry {
    Session session;
    std::uint64_t seq = 0;
    std::map<std::string, Json> acks;  // by idempotency key
    mutable std::mutex write_mutex;
  };

  std::shared_ptr<Entry> find(const std::string& id) const;
  std::string new_session_id();
  std::int64_t now_ms() const;
  Json ack_for(const EventRecord& e, const Session& after) const;
  void commit(Entry& entry, EventRecord e, Session after);

  Dataset dataset_;
  RecommenderModel model_;
  PhraseTable phrases_;
  std::uint64_t seed_base_;
  bool deterministic_ids_;
  std::optional<std::int64_t> fixed_clock_ms_;

  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::map<std::string, std::string> create_keys_;  // idempotency key -> session id
  std::mutex create_mutex_;
  std::uint64_t created_count_ = 0;

  mutable std::mutex log_mutex_;
  EventLogFile log_;
  std::vector<EventRecord> events_;
};

/// The HTTP contract, as plain request handling.
class StudyService {
 public:
  StudyService(SessionStore& store, WeightVector weights);

  ServiceResponse create_session(const std::string& body, const std::optional<std::string>& idempotency_key);
  ServiceResponse next(const std::string& session_id);
  ServiceResponse seed_rating(const std::string& session_id, const std::string& body,
                              const std::optional<std::string>& idempotency_key);
  ServiceResponse explanation_rating(const std::string& session_id, const std::string& trial, const std::string& body,
                                     const std::optional<std::string>& idempotency_key);
  ServiceResponse detail_rating(const std::string& session_id, const std::string& trial, const std::string& body,
                                const std::optional<std::string>& idempotency_key);
  ServiceResponse likert(const std::string& session_id, const std::string& body,
                         const std::optional<std::string>& idempotency_key);
  ServiceResponse export_events(const std::string& format);
  /// Query parameters: format (json|text), style, objective.
  ServiceResponse analysis(const std::string& table, const std::map<std::string, std::string>& query);
  ServiceResponse health();

 private:
  SessionStore& store_;
  WeightVector weights_;
};

/// Task descriptor for GET /sessions/{id}/next. The explanation view carries
/// the explanation only, never the movie.
Json next_task(const Session& s, const Dataset& ds);

/// Builds the store from a configuration: loads data, fits the recommender,
/// opens (and replays) the event log.
std::unique_ptr<SessionStore> open_store(const ServiceConfig& cfg);

/// Serves until stop() is called from another thread; calls on_listening
/// with the bound port.
class HttpServer {
 public:
  explicit HttpServer(StudyService& service);
  ~HttpServer();
  void run(const std::string& host, int port, const std::function<void(int)>& on_listening = nullptr);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace expleval
