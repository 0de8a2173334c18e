#include "expleval/events.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "expleval/errors.hpp"

namespace expleval {

// ---------------------------------------------------------------------------
// JSON forms
// ---------------------------------------------------------------------------

void to_json(Json& j, const Explanation& e) {
  Json evidence = Json::object();
  for (const auto& [k, v] : e.evidence) {
    std::visit([&, key = k](const auto& x) { evidence[key] = x; }, v);
  }
  j = Json{{"style", to_string(e.style)}, {"text", e.text}, {"evidence", std::move(evidence)}};
}

void from_json(const Json& j, Explanation& e) {
  e.style = parse_style(require_field<std::string>(j, "style"));
  e.text = require_field<std::string>(j, "text");
  e.evidence.clear();
  const Json evidence = j.value("evidence", Json::object());
  for (const auto& [k, v] : evidence.items()) {
    if (v.is_number()) e.evidence[k] = v.get<double>();
    else if (v.is_string()) e.evidence[k] = v.get<std::string>();
    else if (v.is_array()) e.evidence[k] = v.get<std::vector<std::string>>();
    else throw ValidationError("evidence '" + k + "' has an unsupported type");
  }
}

namespace {

template <typename T>
void put_optional(Json& j, const char* name, const std::optional<T>& v) {
  j[name] = v ? Json(*v) : Json(nullptr);
}

template <typename T>
std::optional<T> get_optional(const Json& j, const char* name) {
  if (!j.contains(name) || j.at(name).is_null()) return std::nullopt;
  return j.at(name).get<T>();
}

}  // namespace

void to_json(Json& j, const TrialRecord& t) {
  j = Json{{"style", to_string(t.style)}, {"movie_id", t.movie_id}, {"explanation", t.explanation}};
  put_optional(j, "r", t.r);
  put_optional(j, "t_ms", t.t_ms);
  put_optional(j, "r_prime", t.r_prime);
  put_optional(j, "diagnostic", t.diagnostic);
}

void from_json(const Json& j, TrialRecord& t) {
  t.style = parse_style(require_field<std::string>(j, "style"));
  t.movie_id = require_field<std::string>(j, "movie_id");
  t.explanation = j.at("explanation").get<Explanation>();
  t.r = get_optional<int>(j, "r");
  t.t_ms = get_optional<std::int64_t>(j, "t_ms");
  t.r_prime = get_optional<int>(j, "r_prime");
  t.diagnostic = get_optional<std::string>(j, "diagnostic");
}

void to_json(Json& j, const Session& s) {
  Json tasks = Json::array();
  for (const auto& t : s.seed_tasks) {
    Json tj{{"movie_id", t.movie_id}, {"situation", t.situation}};
    put_optional(tj, "score", t.score);
    tasks.push_back(std::move(tj));
  }
  Json likert = Json::array();
  for (const auto& l : s.likert) {
    likert.push_back({{"style", to_string(l.style)}, {"metric", to_string(l.metric)}, {"score", l.score}});
  }
  j = Json{{"session_id", s.session_id},
           {"participant", s.participant},
           {"phase", to_string(s.phase)},
           {"seed_tasks", std::move(tasks)},
           {"trials", s.trials},
           {"likert", std::move(likert)},
           {"rng_seed", s.rng_seed}};
  put_optional(j, "target_situation", s.target_situation);
}

void from_json(const Json& j, Session& s) {
  s.session_id = require_field<std::string>(j, "session_id");
  s.participant = j.at("participant").get<Demographics>();
  s.phase = parse_phase(require_field<std::string>(j, "phase"));
  s.seed_tasks.clear();
  for (const auto& tj : j.at("seed_tasks")) {
    SeedTask t;
    t.movie_id = require_field<std::string>(tj, "movie_id");
    t.situation = tj.at("situation").get<ContextualSituation>();
    t.score = get_optional<int>(tj, "score");
    s.seed_tasks.push_back(std::move(t));
  }
  s.target_situation = get_optional<ContextualSituation>(j, "target_situation");
  s.trials = j.value("trials", Json::array()).get<std::vector<TrialRecord>>();
  s.likert.clear();
  for (const auto& lj : j.value("likert", Json::array())) {
    s.likert.push_back({parse_style(require_field<std::string>(lj, "style")),
                        parse_metric(require_field<std::string>(lj, "metric")), require_field<int>(lj, "score")});
  }
  s.rng_seed = require_field<std::uint64_t>(j, "rng_seed");
}

// ---------------------------------------------------------------------------
// Event records
// ---------------------------------------------------------------------------

std::string serialize_event(const EventRecord& e) {
  Json j{{"seq", e.seq},
         {"type", e.type},
         {"session_id", e.session_id},
         {"payload", e.payload},
         {"server_ts", e.server_ts_ms}};
  if (e.idempotency_key) j["idempotency_key"] = *e.idempotency_key;
  return j.dump();
}

EventRecord parse_event(std::string_view line) {
  Json j;
  try {
    j = Json::parse(line);
  } catch (const Json::parse_error& err) {
    throw ValidationError(std::string("malformed event record: ") + err.what());
  }
  EventRecord e;
  e.seq = require_field<std::uint64_t>(j, "seq");
  e.type = require_field<std::string>(j, "type");
  e.session_id = require_field<std::string>(j, "session_id");
  e.payload = j.value("payload", Json::object());
  e.server_ts_ms = j.value("server_ts", std::int64_t{0});
  e.idempotency_key = get_optional<std::string>(j, "idempotency_key");
  return e;
}

// ---------------------------------------------------------------------------
// Transitions
// ---------------------------------------------------------------------------

Transition create_session(const Dataset& ds, std::string session_id, Demographics participant,
                          std::uint64_t rng_seed) {
  Transition t{start_session(ds, std::move(session_id), std::move(participant), rng_seed),
               std::string(event_type::kSessionCreated), {}};
  t.payload = t.session;
  return t;
}

Transition seed_rating(const Session& s, std::size_t task_index, int score, const StudyContext& ctx) {
  Transition t{submit_seed_rating(s, task_index, score, ctx), std::string(event_type::kSeedRating),
               Json{{"task_index", task_index}, {"score", score}}};
  if (t.session.phase == Phase::Trials) {
    t.payload["target_situation"] = *t.session.target_situation;
    t.payload["trials"] = t.session.trials;
  }
  return t;
}

Transition explanation_rating(const Session& s, std::size_t trial_index, int r, std::int64_t t_ms) {
  Transition t{record_explanation_rating(s, trial_index, r, t_ms), std::string(event_type::kExplanationRating),
               Json{{"trial_index", trial_index}, {"r", r}, {"t_ms", t_ms}}};
  t.payload["style"] = to_string(t.session.trials[trial_index].style);
  t.payload["movie_id"] = t.session.trials[trial_index].movie_id;
  return t;
}

Transition detail_rating(const Session& s, std::size_t trial_index, int r_prime) {
  Transition t{record_detail_rating(s, trial_index, r_prime), std::string(event_type::kDetailRating),
               Json{{"trial_index", trial_index}, {"r_prime", r_prime}}};
  t.payload["style"] = to_string(t.session.trials[trial_index].style);
  t.payload["movie_id"] = t.session.trials[trial_index].movie_id;
  return t;
}

Transition likert_response(const Session& s, ExplanationStyle style, MetricId metric, int score) {
  return {submit_likert(s, style, metric, score), std::string(event_type::kLikert),
          Json{{"style", to_string(style)}, {"metric", to_string(metric)}, {"score", score}}};
}

namespace {

void check_trial_identity(const Session& s, std::size_t k, const Json& payload) {
  const auto& trial = s.trials.at(k);
  if (payload.contains("style") && payload.at("style").get<std::string>() != to_string(trial.style)) {
    throw ValidationError("event style does not match trial " + std::to_string(k));
  }
  if (payload.contains("movie_id") && payload.at("movie_id").get<std::string>() != trial.movie_id) {
    throw ValidationError("event movie does not match trial " + std::to_string(k));
  }
}

}  // namespace

Session apply_event(const std::optional<Session>& current, const EventRecord& e) {
  const Json& p = e.payload;
  if (e.type == event_type::kSessionCreated) {
    if (current) throw StateError("session " + e.session_id + " created twice");
    auto s = p.get<Session>();
    if (s.session_id != e.session_id) throw ValidationError("created payload names a different session");
    return s;
  }
  if (!current) throw StateError("event " + e.type + " for unknown session " + e.session_id);
  if (e.type == event_type::kSeedRating) {
    auto s = store_seed_rating(*current, require_field<std::size_t>(p, "task_index"), require_field<int>(p, "score"));
    if (p.contains("trials")) {
      if (s.answered_seed_count() != kSeedTaskCount) throw StateError("trials assigned before seeding finished");
      s.target_situation = p.at("target_situation").get<ContextualSituation>();
      s.trials = p.at("trials").get<std::vector<TrialRecord>>();
      s.phase = Phase::Trials;
    } else if (s.answered_seed_count() == kSeedTaskCount) {
      throw ValidationError("final seed rating event carries no trial assignment");
    }
    return s;
  }
  if (e.type == event_type::kExplanationRating) {
    const auto k = require_field<std::size_t>(p, "trial_index");
    auto s = record_explanation_rating(*current, k, require_field<int>(p, "r"), require_field<std::int64_t>(p, "t_ms"));
    check_trial_identity(s, k, p);
    return s;
  }
  if (e.type == event_type::kDetailRating) {
    const auto k = require_field<std::size_t>(p, "trial_index");
    auto s = record_detail_rating(*current, k, require_field<int>(p, "r_prime"));
    check_trial_identity(s, k, p);
    return s;
  }
  if (e.type == event_type::kLikert) {
    return submit_likert(*current, parse_style(require_field<std::string>(p, "style")),
                         parse_metric(require_field<std::string>(p, "metric")), require_field<int>(p, "score"));
  }
  throw ValidationError("unknown event type '" + e.type + "'");
}

std::map<std::string, Session> replay(std::span<const EventRecord> events) {
  std::map<std::string, Session> sessions;
  std::map<std::string, std::uint64_t> last_seq;
  for (const auto& e : events) {
    auto& seq = last_seq[e.session_id];
    if (e.seq != seq + 1) {
      throw ValidationError("session " + e.session_id + ": expected seq " + std::to_string(seq + 1) + ", got " +
                            std::to_string(e.seq));
    }
    seq = e.seq;
    auto it = sessions.find(e.session_id);
    std::optional<Session> current;
    if (it != sessions.end()) current = it->second;
    sessions.insert_or_assign(e.session_id, apply_event(current, e));
  }
  return sessions;
}

std::vector<Session> complete_sessions(std::span<const EventRecord> events) {
  std::vector<Session> out;
  for (auto& [id, s] : replay(events)) {
    if (s.phase == Phase::Complete) out.push_back(std::move(s));
  }
  return out;
}

std::vector<EventRecord> read_event_log(std::istream& in) {
  std::vector<EventRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(parse_event(line));
  }
  return out;
}

std::vector<EventRecord> read_event_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open event log " + path.string());
  return read_event_log(in);
}

// ---------------------------------------------------------------------------
// Log file
// ---------------------------------------------------------------------------

EventLogFile::EventLogFile(std::filesystem::path path) : path_(std::move(path)) {
  std::string data;
  if (std::filesystem::exists(path_)) {
    std::ifstream in(path_, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    data = buf.str();
    const auto last_newline = data.rfind('\n');
    const std::size_t keep = last_newline == std::string::npos ? 0 : last_newline + 1;
    if (keep != data.size()) {
      std::filesystem::resize_file(path_, keep);
      data.resize(keep);
    }
  }
  std::istringstream in(data);
  recovered_ = read_event_log(in);
  fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) throw IoError("cannot open event log " + path_.string() + ": " + std::strerror(errno));
}

EventLogFile::~EventLogFile() {
  if (fd_ >= 0) ::close(fd_);
}

void EventLogFile::append(const EventRecord& e) {
  const std::string line = serialize_event(e) + '\n';
  std::lock_guard lock(mutex_);
  std::size_t written = 0;
  while (written < line.size()) {
    const auto n = ::write(fd_, line.data() + written, line.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw IoError("event log write failed: " + std::string(std::strerror(errno)));
    }
    written += static_cast<std::size_t>(n);
  }
  if (::fsync(fd_) != 0) throw IoError("event log fsync failed: " + std::string(std::strerror(errno)));
}

std::string EventLogFile::contents() const {
  std::lock_guard lock(mutex_);
  std::ifstream in(path_, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace expleval
