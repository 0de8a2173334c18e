#include <httplib.h>

#include "expleval/errors.hpp"
#include "expleval/log.hpp"
#include "expleval/random.hpp"
#include "expleval/service.hpp"

namespace expleval {

namespace {

ServiceResponse json_response(int status, const Json& j) { return {status, j.dump(), "application/json"}; }

ServiceResponse error_response(int status, const std::string& message) {
  return json_response(status, Json{{"error", message}});
}

template <typename F>
ServiceResponse guarded(F&& f) {
  try {
    return f();
  } catch (const NotFoundError& e) {
    return error_response(404, e.what());
  } catch (const ValidationError& e) {
    return error_response(422, e.what());
  } catch (const StateError& e) {
    return error_response(409, e.what());
  } catch (const InsufficientDataError& e) {
    return error_response(409, e.what());
  } catch (const Json::exception& e) {
    return error_response(422, std::string("malformed request: ") + e.what());
  } catch (const std::exception& e) {
    log::error(e.what());
    return error_response(500, e.what());
  }
}

Json parse_body(const std::string& body) {
  if (body.empty()) throw ValidationError("request body is required");
  try {
    auto j = Json::parse(body);
    if (!j.is_object()) throw ValidationError("request body must be a JSON object");
    return j;
  } catch (const Json::parse_error& e) {
    throw ValidationError(std::string("request body is not valid JSON: ") + e.what());
  }
}

std::size_t parse_index(const std::string& text, const char* what) {
  if (text.empty() || text.size() > 6 || text.find_first_not_of("0123456789") != std::string::npos) {
    throw ValidationError(std::string(what) + " must be a non-negative integer");
  }
  return static_cast<std::size_t>(std::stoul(text));
}

}  // namespace

Json next_task(const Session& s, const Dataset& ds) {
  switch (s.phase) {
    case Phase::SeedRating: {
      const auto k = *s.next_unanswered_seed();
      const auto& task = s.seed_tasks[k];
      return Json{{"phase", to_string(s.phase)},       {"task_index", k},
                  {"of", kSeedTaskCount},              {"movie", ds.movie(task.movie_id)},
                  {"situation", task.situation}};
    }
    case Phase::Trials: {
      const auto k = *s.current_trial();
      const auto& trial = s.trials[k];
      if (!trial.r) {
        char handle[32];
        std::snprintf(handle, sizeof handle, "t%016llx",
                      static_cast<unsigned long long>(derive_seed(s.rng_seed, "trial:" + std::to_string(k))));
        return Json{{"phase", to_string(s.phase)},
                    {"view", "explanation"},
                    {"trial_index", k},
                    {"of", kTrialCount},
                    {"trial_handle", handle},
                    {"explanation", Json{{"style", to_string(trial.style)}, {"text", trial.explanation.text}}}};
      }
      return Json{{"phase", to_string(s.phase)},
                  {"view", "detail"},
                  {"trial_index", k},
                  {"of", kTrialCount},
                  {"movie", ds.movie(trial.movie_id)}};
    }
    case Phase::Questionnaire: {
      const auto [style, metric] = *s.next_likert_cell();
      return Json{{"phase", to_string(s.phase)},
                  {"style", to_string(style)},
                  {"metric", to_string(metric)},
                  {"answered", s.likert.size()},
                  {"of", kLikertCount}};
    }
    case Phase::Complete:
      return Json{{"phase", to_string(s.phase)}, {"export", "/export?format=ndjson"}};
  }
  throw StateError("unknown phase");
}

StudyService::StudyService(SessionStore& store, WeightVector weights) : store_(store), weights_(std::move(weights)) {
  weights_.validate();
}

ServiceResponse StudyService::create_session(const std::string& body, const std::optional<std::string>& key) {
  return guarded([&] {
    const auto d = parse_body(body).get<Demographics>();
    const auto created = store_.create(d, key);
    const auto ctx = store_.context();
    return json_response(201, Json{{"session_id", created.session.session_id},
                                   {"task", next_task(created.session, ctx.dataset)}});
  });
}

ServiceResponse StudyService::next(const std::string& session_id) {
  return guarded([&] { return json_response(200, next_task(store_.snapshot(session_id), store_.context().dataset)); });
}

ServiceResponse StudyService::seed_rating(const std::string& session_id, const std::string& body,
                                          const std::optional<std::string>& key) {
  return guarded([&] {
    const auto j = parse_body(body);
    const auto index = require_field<std::size_t>(j, "task_index");
    const auto score = require_field<int>(j, "score");
    const auto ctx = store_.context();
    return json_response(200, store_.write(session_id, key, [&](const Session& s) {
      return expleval::seed_rating(s, index, score, ctx);
    }));
  });
}

ServiceResponse StudyService::explanation_rating(const std::string& session_id, const std::string& trial,
                                                 const std::string& body, const std::optional<std::string>& key) {
  return guarded([&] {
    const auto k = parse_index(trial, "trial index");
    const auto j = parse_body(body);
    const auto r = require_field<int>(j, "r");
    const auto t_ms = require_field<std::int64_t>(j, "t_ms");
    return json_response(200, store_.write(session_id, key, [&](const Session& s) {
      return expleval::explanation_rating(s, k, r, t_ms);
    }));
  });
}

ServiceResponse StudyService::detail_rating(const std::string& session_id, const std::string& trial,
                                            const std::string& body, const std::optional<std::string>& key) {
  return guarded([&] {
    const auto k = parse_index(trial, "trial index");
    const auto j = parse_body(body);
    const auto r_prime = require_field<int>(j, "r_prime");
    return json_response(200, store_.write(session_id, key, [&](const Session& s) {
      return expleval::detail_rating(s, k, r_prime);
    }));
  });
}

ServiceResponse StudyService::likert(const std::string& session_id, const std::string& body,
                                     const std::optional<std::string>& key) {
  return guarded([&] {
    const auto j = parse_body(body);
    const auto style = parse_style(require_field<std::string>(j, "style"));
    const auto metric = parse_metric(require_field<std::string>(j, "metric"));
    const auto score = require_field<int>(j, "score");
    return json_response(200, store_.write(session_id, key, [&](const Session& s) {
      return likert_response(s, style, metric, score);
    }));
  });
}

ServiceResponse StudyService::export_events(const std::string& format) {
  return guarded([&] {
    if (!format.empty() && format != "ndjson") throw ValidationError("unsupported export format '" + format + "'");
    return ServiceResponse{200, store_.export_ndjson(), "application/x-ndjson"};
  });
}

ServiceResponse StudyService::analysis(const std::string& table, const std::map<std::string, std::string>& query) {
  return guarded([&] {
    const auto kind = parse_report_kind(table);
    ReportOptions opts;
    opts.weights = weights_;
    opts.format = ReportFormat::Json;
    if (auto it = query.find("format"); it != query.end()) opts.format = parse_report_format(it->second);
    if (auto it = query.find("style"); it != query.end()) opts.correlation_style = parse_style(it->second);
    if (auto it = query.find("objective"); it != query.end()) opts.correlation_objective = it->second == "1";
    const auto sessions = store_.complete_sessions();
    if (sessions.empty()) throw InsufficientDataError("no complete sessions");
    auto body = render_report(kind, sessions, opts);
    return ServiceResponse{200, std::move(body),
                           opts.format == ReportFormat::Json ? "application/json" : "text/plain; charset=utf-8"};
  });
}

ServiceResponse StudyService::health() {
  return json_response(200, Json{{"status", "ok"}, {"sessions", store_.session_count()}});
}

// ---------------------------------------------------------------------------
// HTTP binding
// ---------------------------------------------------------------------------

struct HttpServer::Impl {
  httplib::Server server;
};

HttpServer::HttpServer(StudyService& service) : impl_(std::make_unique<Impl>()) {
  auto& svr = impl_->server;
  auto send = [](httplib::Response& res, const ServiceResponse& r) {
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  auto key_of = [](const httplib::Request& req) -> std::optional<std::string> {
    if (!req.has_header("Idempotency-Key")) return std::nullopt;
    return req.get_header_value("Idempotency-Key");
  };
  svr.Post("/sessions", [&service, send, key_of](const httplib::Request& req, httplib::Response& res) {
    send(res, service.create_session(req.body, key_of(req)));
  });
  svr.Get(R"(/sessions/([^/]+)/next)", [&service, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service.next(req.matches[1]));
  });
  svr.Post(R"(/sessions/([^/]+)/seed-ratings)",
           [&service, send, key_of](const httplib::Request& req, httplib::Response& res) {
             send(res, service.seed_rating(req.matches[1], req.body, key_of(req)));
           });
  svr.Post(R"(/sessions/([^/]+)/trials/([^/]+)/explanation-rating)",
           [&service, send, key_of](const httplib::Request& req, httplib::Response& res) {
             send(res, service.explanation_rating(req.matches[1], req.matches[2], req.body, key_of(req)));
           });
  svr.Post(R"(/sessions/([^/]+)/trials/([^/]+)/detail-rating)",
           [&service, send, key_of](const httplib::Request& req, httplib::Response& res) {
             send(res, service.detail_rating(req.matches[1], req.matches[2], req.body, key_of(req)));
           });
  svr.Post(R"(/sessions/([^/]+)/likert)", [&service, send, key_of](const httplib::Request& req, httplib::Response& res) {
    send(res, service.likert(req.matches[1], req.body, key_of(req)));
  });
  svr.Get("/export", [&service, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service.export_events(req.has_param("format") ? req.get_param_value("format") : ""));
  });
  svr.Get(R"(/analysis/([^/]+))", [&service, send](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> query;
    for (const auto& [k, v] : req.params) query[k] = v;
    send(res, service.analysis(req.matches[1], query));
  });
  svr.Get("/healthz", [&service, send](const httplib::Request&, httplib::Response& res) { send(res, service.health()); });
}

HttpServer::~HttpServer() = default;

void HttpServer::run(const std::string& host, int port, const std::function<void(int)>& on_listening) {
  auto& svr = impl_->server;
  int bound = port;
  if (port == 0) {
    bound = svr.bind_to_any_port(host);
  } else if (!svr.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) throw IoError("cannot listen on " + host + ":" + std::to_string(port));
  if (on_listening) on_listening(bound);
  svr.listen_after_bind();
}

void HttpServer::stop() { impl_->server.stop(); }

}  // namespace expleval
