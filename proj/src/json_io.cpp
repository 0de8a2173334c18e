#include "expleval/json_io.hpp"

#include "expleval/errors.hpp"

namespace expleval {

void throw_missing_field(const char* name) {
  throw ValidationError(std::string("missing field '") + name + "'");
}

void throw_bad_field(const char* name) {
  throw ValidationError(std::string("field '") + name + "' has the wrong type");
}

void to_json(Json& j, const ContextualSituation& s) {
  j = Json::object();
  for (const auto& [f, c] : s.assignments()) j[std::string(to_string(f))] = c;
}

void from_json(const Json& j, ContextualSituation& s) {
  if (!j.is_object()) throw ValidationError("situation must be an object");
  s = {};
  for (const auto& [k, v] : j.items()) s.assign(parse_study_factor(k), v.get<std::string>());
}

void to_json(Json& j, const Movie& m) {
  j = Json{{"movie_id", m.movie_id}, {"title", m.title},   {"director", m.director},
           {"actors", m.actors},     {"genres", m.genres}, {"year", m.year}};
}

void from_json(const Json& j, Movie& m) {
  m.movie_id = require_field<std::string>(j, "movie_id");
  m.title = require_field<std::string>(j, "title");
  m.director = j.value("director", std::string{});
  m.actors = j.value("actors", std::vector<std::string>{});
  m.genres = j.value("genres", std::vector<std::string>{});
  m.year = j.value("year", 0);
}

void to_json(Json& j, const ContextualRating& r) {
  j = Json{{"user_id", r.user_id},
           {"movie_id", r.movie_id},
           {"score", r.score},
           {"situation", r.situation},
           {"extra", r.extra_context},
           {"timestamp", r.timestamp}};
}

void from_json(const Json& j, ContextualRating& r) {
  r.user_id = require_field<std::string>(j, "user_id");
  r.movie_id = require_field<std::string>(j, "movie_id");
  r.score = require_field<int>(j, "score");
  r.situation = j.value("situation", Json::object()).get<ContextualSituation>();
  r.extra_context = j.value("extra", std::map<std::string, std::string>{});
  r.timestamp = j.value("timestamp", std::int64_t{0});
}

void to_json(Json& j, const ContextualFactor& f) {
  j = Json{{"factor", to_string(f.factor_id)}, {"vocabulary", f.vocabulary}};
}

void from_json(const Json& j, ContextualFactor& f) {
  f.factor_id = parse_study_factor(require_field<std::string>(j, "factor"));
  f.vocabulary = require_field<std::vector<std::string>>(j, "vocabulary");
}

void to_json(Json& j, const Demographics& d) {
  j = Json{{"age_band", d.age_band},
           {"gender", d.gender},
           {"education", d.education},
           {"occupation", d.occupation},
           {"watch_frequency", d.watch_frequency}};
}

void from_json(const Json& j, Demographics& d) {
  if (!j.is_object()) throw ValidationError("demographics must be an object");
  d.age_band = require_field<std::string>(j, "age_band");
  d.gender = require_field<std::string>(j, "gender");
  d.education = require_field<std::string>(j, "education");
  d.occupation = require_field<std::string>(j, "occupation");
  d.watch_frequency = require_field<std::string>(j, "watch_frequency");
}

}  // namespace expleval
