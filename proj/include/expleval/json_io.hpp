#pragma once

#include <json.hpp>

#include "expleval/domain.hpp"

namespace expleval {

using Json = nlohmann::json;

void to_json(Json& j, const ContextualSituation& s);
void from_json(const Json& j, ContextualSituation& s);

void to_json(Json& j, const Movie& m);
void from_json(const Json& j, Movie& m);

void to_json(Json& j, const ContextualRating& r);
void from_json(const Json& j, ContextualRating& r);

void to_json(Json& j, const ContextualFactor& f);
void from_json(const Json& j, ContextualFactor& f);

void to_json(Json& j, const Demographics& d);
/// Strict: every demographic field must be present and a string.
void from_json(const Json& j, Demographics& d);

[[noreturn]] void throw_missing_field(const char* name);
[[noreturn]] void throw_bad_field(const char* name);

/// Typed field access that reports the field name in a ValidationError.
template <typename T>
T require_field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) {
    throw_missing_field(name);
  }
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw_bad_field(name);
  }
}

}  // namespace expleval
