#include "expleval/domain.hpp"

#include <algorithm>
#include <set>

#include "expleval/errors.hpp"

namespace expleval {

namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view s, const std::array<Enum, N>& all, std::string_view kind) {
  for (Enum e : all) {
    if (to_string(e) == s) return e;
  }
  throw ValidationError("unknown " + std::string(kind) + " '" + std::string(s) + "'");
}

}  // namespace

std::string_view to_string(StudyFactor f) {
  switch (f) {
    case StudyFactor::PhysicalWellness: return "PhysicalWellness";
    case StudyFactor::Mood: return "Mood";
    case StudyFactor::Location: return "Location";
    case StudyFactor::Weather: return "Weather";
  }
  return "?";
}

std::string_view to_string(ExplanationStyle s) {
  switch (s) {
    case ExplanationStyle::Avg: return "Avg";
    case ExplanationStyle::Per: return "Per";
    case ExplanationStyle::Simu: return "Simu";
    case ExplanationStyle::Simi: return "Simi";
    case ExplanationStyle::Content: return "Content";
    case ExplanationStyle::ContextAware: return "ContextAware";
  }
  return "?";
}

std::string_view to_string(MetricId m) {
  switch (m) {
    case MetricId::Efficiency: return "Efficiency";
    case MetricId::Effectiveness: return "Effectiveness";
    case MetricId::Persuasiveness: return "Persuasiveness";
    case MetricId::Satisfaction: return "Satisfaction";
    case MetricId::Trust: return "Trust";
    case MetricId::Transparency: return "Transparency";
  }
  return "?";
}

std::string_view to_string(AppraisalGrade g) {
  switch (g) {
    case AppraisalGrade::VeryPoor: return "VeryPoor";
    case AppraisalGrade::Poor: return "Poor";
    case AppraisalGrade::Medium: return "Medium";
    case AppraisalGrade::Good: return "Good";
    case AppraisalGrade::VeryGood: return "VeryGood";
  }
  return "?";
}

std::string_view display_name(ExplanationStyle s) {
  return s == ExplanationStyle::ContextAware ? "Context-aware" : to_string(s);
}

std::string_view display_name(AppraisalGrade g) {
  switch (g) {
    case AppraisalGrade::VeryPoor: return "Very poor";
    case AppraisalGrade::Poor: return "Poor";
    case AppraisalGrade::Medium: return "Medium";
    case AppraisalGrade::Good: return "Good";
    case AppraisalGrade::VeryGood: return "Very good";
  }
  return "?";
}

StudyFactor parse_study_factor(std::string_view s) { return parse_enum(s, kStudyFactors, "factor"); }
ExplanationStyle parse_style(std::string_view s) { return parse_enum(s, kAllStyles, "explanation style"); }
MetricId parse_metric(std::string_view s) { return parse_enum(s, kAllMetrics, "metric"); }

std::size_t index_of(ExplanationStyle s) { return static_cast<std::size_t>(s); }
std::size_t index_of(MetricId m) { return static_cast<std::size_t>(m); }
int ordinal(AppraisalGrade g) { return static_cast<int>(g); }

bool is_valid_score(int score) { return score >= kMinScore && score <= kMaxScore; }

void require_score(int score, std::string_view what) {
  if (!is_valid_score(score)) {
    throw ValidationError(std::string(what) + " must be in [1,5], got " + std::to_string(score));
  }
}

AppraisalGrade grade_of_score(int score) {
  require_score(score, "score");
  return static_cast<AppraisalGrade>(score);
}

bool ContextualFactor::contains(std::string_view condition) const {
  return std::find(vocabulary.begin(), vocabulary.end(), condition) != vocabulary.end();
}

void ContextualFactor::validate() const {
  if (vocabulary.empty()) {
    throw ValidationError("factor " + std::string(to_string(factor_id)) + " has an empty vocabulary");
  }
  std::set<std::string_view> seen;
  for (const auto& c : vocabulary) {
    if (!seen.insert(c).second) {
      throw ValidationError("factor " + std::string(to_string(factor_id)) +
                            " lists condition '" + c + "' twice");
    }
  }
}

std::vector<ContextualFactor> default_study_factors() {
  return {
      {StudyFactor::PhysicalWellness, {"healthy", "ill"}},
      {StudyFactor::Mood, {"positive", "neutral", "negative"}},
      {StudyFactor::Location, {"home", "public", "friends_house"}},
      {StudyFactor::Weather, {"sunny", "rainy", "stormy", "snowy", "cloudy"}},
  };
}

std::optional<ConditionId> ContextualSituation::get(StudyFactor f) const {
  auto it = assignments_.find(f);
  if (it == assignments_.end()) return std::nullopt;
  return it->second;
}

bool ContextualSituation::is_complete() const {
  return std::all_of(kStudyFactors.begin(), kStudyFactors.end(),
                     [this](StudyFactor f) { return assignments_.contains(f); });
}

void ContextualSituation::validate_against(const std::vector<ContextualFactor>& schema) const {
  for (const auto& [factor, condition] : assignments_) {
    auto it = std::find_if(schema.begin(), schema.end(),
                           [f = factor](const ContextualFactor& cf) { return cf.factor_id == f; });
    if (it == schema.end()) {
      throw ValidationError("factor " + std::string(to_string(factor)) + " is not in the schema");
    }
    if (!it->contains(condition)) {
      throw ValidationError("condition '" + condition + "' is not in the vocabulary of " +
                            std::string(to_string(factor)));
    }
  }
}

}  // namespace expleval
