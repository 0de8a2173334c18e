#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>

#include "expleval/errors.hpp"
#include "expleval/log.hpp"
#include "expleval/random.hpp"
#include "expleval/service.hpp"
#include "expleval/synthetic.hpp"

namespace expleval {

namespace {

std::optional<std::filesystem::path> env_path(const std::function<const char*(const char*)>& get, const char* name) {
  const char* v = get(name);
  if (!v || !*v) return std::nullopt;
  return std::filesystem::path(v);
}

std::uint64_t parse_u64(const std::string& text, const char* name) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::logic_error&) {
    throw ValidationError(std::string(name) + " must be an unsigned integer, got '" + text + "'");
  }
}

}  // namespace

ServiceConfig ServiceConfig::from_env(const std::function<const char*(const char*)>& getenv) {
  const std::function<const char*(const char*)> get = getenv ? getenv : [](const char* n) { return std::getenv(n); };
  ServiceConfig c;
  c.ratings = env_path(get, "EXPLEVAL_RATINGS");
  c.catalog = env_path(get, "EXPLEVAL_CATALOG");
  c.schema = env_path(get, "EXPLEVAL_SCHEMA");
  c.recommender_config = env_path(get, "EXPLEVAL_RECOMMENDER_CONFIG");
  c.phrases = env_path(get, "EXPLEVAL_PHRASES");
  c.weights = env_path(get, "EXPLEVAL_WEIGHTS");
  if (auto p = env_path(get, "EXPLEVAL_EVENT_LOG")) c.event_log = *p;
  if (const char* listen = get("EXPLEVAL_LISTEN"); listen && *listen) {
    const std::string s(listen);
    const auto colon = s.rfind(':');
    if (colon == std::string::npos) throw ValidationError("EXPLEVAL_LISTEN must be host:port");
    c.host = s.substr(0, colon);
    const auto port = parse_u64(s.substr(colon + 1), "EXPLEVAL_LISTEN port");
    if (port > 65535) throw ValidationError("EXPLEVAL_LISTEN port out of range");
    c.port = static_cast<int>(port);
  }
  if (const char* seed = get("EXPLEVAL_SEED_BASE"); seed && *seed) c.seed_base = parse_u64(seed, "EXPLEVAL_SEED_BASE");
  if (const char* ids = get("EXPLEVAL_TEST_DETERMINISTIC_IDS"); ids && std::string(ids) == "1") c.deterministic_ids = true;
  if (const char* clock = get("EXPLEVAL_TEST_FIXED_CLOCK_MS"); clock && *clock) {
    c.fixed_clock_ms = static_cast<std::int64_t>(parse_u64(clock, "EXPLEVAL_TEST_FIXED_CLOCK_MS"));
  }
  return c;
}

// ---------------------------------------------------------------------------
// Store
// ---------------------------------------------------------------------------

SessionStore::SessionStore(Dataset dataset, RecommenderConfig recommender, PhraseTable phrases,
                           std::filesystem::path event_log, std::uint64_t seed_base, bool deterministic_ids,
                           std::optional<std::int64_t> fixed_clock_ms)
    : dataset_(std::move(dataset)),
      model_(dataset_, recommender),
      phrases_(std::move(phrases)),
      seed_base_(seed_base),
      deterministic_ids_(deterministic_ids),
      fixed_clock_ms_(fixed_clock_ms),
      log_(std::move(event_log)) {
  std::map<std::string, std::uint64_t> seqs;
  for (const auto& e : log_.recovered()) {
    auto& seq = seqs[e.session_id];
    if (e.seq != seq + 1) {
      throw ValidationError("event log: session " + e.session_id + " expected seq " + std::to_string(seq + 1));
    }
    seq = e.seq;
    auto it = sessions_.find(e.session_id);
    std::optional<Session> current;
    if (it != sessions_.end()) current = it->second->session;
    Session after = apply_event(current, e);
    if (it == sessions_.end()) {
      it = sessions_.emplace(e.session_id, std::make_shared<Entry>()).first;
      ++created_count_;
    }
    Entry& entry = *it->second;
    if (e.idempotency_key) {
      if (e.type == event_type::kSessionCreated) {
        create_keys_[*e.idempotency_key] = e.session_id;
      } else {
        entry.acks[*e.idempotency_key] = ack_for(e, after);
      }
    }
    entry.session = std::move(after);
    entry.seq = e.seq;
    events_.push_back(e);
  }
  if (!events_.empty()) {
    log::info("recovered " + std::to_string(events_.size()) + " events for " + std::to_string(sessions_.size()) +
              " sessions");
  }
}

std::shared_ptr<SessionStore::Entry> SessionStore::find(const std::string& id) const {
  std::shared_lock lock(sessions_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFoundError("unknown session '" + id + "'");
  return it->second;
}

std::string SessionStore::new_session_id() {
  char buf[40];
  if (deterministic_ids_) {
    for (std::uint64_t n = created_count_ + 1;; ++n) {
      std::snprintf(buf, sizeof buf, "s%016llx", static_cast<unsigned long long>(derive_seed(seed_base_, n)));
      std::shared_lock lock(sessions_mutex_);
      if (!sessions_.count(buf)) return buf;
    }
  }
  static thread_local std::random_device rd;
  for (;;) {
    std::uint64_t hi = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    std::uint64_t lo = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(hi),
                  static_cast<unsigned long long>(lo));
    std::shared_lock lock(sessions_mutex_);
    if (!sessions_.count(buf)) return buf;
  }
}

std::int64_t SessionStore::now_ms() const {
  if (fixed_clock_ms_) return *fixed_clock_ms_;
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

Json SessionStore::ack_for(const EventRecord& e, const Session& after) const {
  return Json{{"session_id", e.session_id}, {"seq", e.seq}, {"event", e.type}, {"phase", to_string(after.phase)}};
}

void SessionStore::commit(Entry& entry, EventRecord e, Session after) {
  {
    std::lock_guard lock(log_mutex_);
    log_.append(e);
    events_.push_back(e);
  }
  entry.session = std::move(after);
  entry.seq = e.seq;
}

SessionStore::Created SessionStore::create(const Demographics& d, const std::optional<std::string>& idempotency_key) {
  std::lock_guard create_lock(create_mutex_);
  if (idempotency_key) {
    if (auto it = create_keys_.find(*idempotency_key); it != create_keys_.end()) {
      // The acknowledgement describes the session as created.
      std::lock_guard lock(log_mutex_);
      for (const auto& e : events_) {
        if (e.session_id == it->second && e.seq == 1) return {apply_event(std::nullopt, e), true};
      }
      throw StateError("created event for session " + it->second + " is missing");
    }
  }
  const std::string id = new_session_id();
  Transition t = expleval::create_session(dataset_, id, d, derive_seed(seed_base_, "session:" + id));
  auto entry = std::make_shared<Entry>();
  EventRecord e{1, t.type, id, t.payload, now_ms(), idempotency_key};
  commit(*entry, e, t.session);
  {
    std::unique_lock lock(sessions_mutex_);
    sessions_.emplace(id, entry);
  }
  ++created_count_;
  if (idempotency_key) create_keys_[*idempotency_key] = id;
  return {std::move(t.session), false};
}

Json SessionStore::write(const std::string& session_id, const std::optional<std::string>& idempotency_key,
                         const std::function<Transition(const Session&)>& step) {
  auto entry = find(session_id);
  std::lock_guard lock(entry->write_mutex);
  if (idempotency_key) {
    if (auto it = entry->acks.find(*idempotency_key); it != entry->acks.end()) return it->second;
  }
  Transition t = step(entry->session);
  EventRecord e{entry->seq + 1, t.type, session_id, std::move(t.payload), now_ms(), idempotency_key};
  Json ack = ack_for(e, t.session);
  commit(*entry, std::move(e), std::move(t.session));
  if (idempotency_key) entry->acks[*idempotency_key] = ack;
  return ack;
}

Session SessionStore::snapshot(const std::string& session_id) const {
  auto entry = find(session_id);
  std::lock_guard lock(entry->write_mutex);
  return entry->session;
}

std::vector<Session> SessionStore::complete_sessions() const {
  std::vector<EventRecord> events;
  {
    std::lock_guard lock(log_mutex_);
    events = events_;
  }
  return expleval::complete_sessions(events);
}

std::size_t SessionStore::session_count() const {
  std::shared_lock lock(sessions_mutex_);
  return sessions_.size();
}

std::string SessionStore::export_ndjson() const {
  std::lock_guard lock(log_mutex_);
  std::string out;
  for (const auto& e : events_) {
    out += serialize_event(e);
    out += '\n';
  }
  return out;
}

std::unique_ptr<SessionStore> open_store(const ServiceConfig& cfg) {
  Dataset ds;
  if (cfg.ratings) {
    auto loaded = load_dataset(*cfg.ratings, cfg.catalog, cfg.schema);
    for (const auto& r : loaded.rejected) log::warn("line " + std::to_string(r.line) + ": " + r.message);
    ds = std::move(loaded.dataset);
  } else {
    log::warn("EXPLEVAL_RATINGS not set; serving the built-in synthetic dataset");
    ds = synthetic_dataset();
  }
  const auto rec = cfg.recommender_config ? RecommenderConfig::from_document(KvDocument::load(*cfg.recommender_config))
                                          : RecommenderConfig{};
  auto phrases = cfg.phrases ? PhraseTable::from_document(KvDocument::load(*cfg.phrases)) : PhraseTable::defaults();
  return std::make_unique<SessionStore>(std::move(ds), rec, std::move(phrases), cfg.event_log, cfg.seed_base,
                                        cfg.deterministic_ids, cfg.fixed_clock_ms);
}

}  // namespace expleval
