#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace expleval {

using UserId = std::string;
using MovieId = std::string;
using ConditionId = std::string;

// ---------------------------------------------------------------------------
// Enumerations
// ---------------------------------------------------------------------------

/// The four contextual factors retained by the study. Other dataset factors
/// are carried through verbatim in ContextualRating::extra_context.
enum class StudyFactor { PhysicalWellness, Mood, Location, Weather };

inline constexpr std::array<StudyFactor, 4> kStudyFactors = {
    StudyFactor::PhysicalWellness, StudyFactor::Mood, StudyFactor::Location, StudyFactor::Weather};

enum class ExplanationStyle { Avg, Per, Simu, Simi, Content, ContextAware };

inline constexpr std::array<ExplanationStyle, 6> kAllStyles = {
    ExplanationStyle::Avg,     ExplanationStyle::Per,     ExplanationStyle::Simu,
    ExplanationStyle::Simi,    ExplanationStyle::Content, ExplanationStyle::ContextAware};

enum class MetricId { Efficiency, Effectiveness, Persuasiveness, Satisfaction, Trust, Transparency };

inline constexpr std::array<MetricId, 6> kAllMetrics = {
    MetricId::Efficiency, MetricId::Effectiveness, MetricId::Persuasiveness,
    MetricId::Satisfaction, MetricId::Trust, MetricId::Transparency};

enum class AppraisalGrade { VeryPoor = 1, Poor = 2, Medium = 3, Good = 4, VeryGood = 5 };

inline constexpr std::array<AppraisalGrade, 5> kAllGrades = {
    AppraisalGrade::VeryPoor, AppraisalGrade::Poor, AppraisalGrade::Medium,
    AppraisalGrade::Good, AppraisalGrade::VeryGood};

inline constexpr int kMinScore = 1;
inline constexpr int kMaxScore = 5;

std::string_view to_string(StudyFactor f);
std::string_view to_string(ExplanationStyle s);
std::string_view to_string(MetricId m);
std::string_view to_string(AppraisalGrade g);

/// Human-facing label ("Context-aware", "Very good", ...).
std::string_view display_name(ExplanationStyle s);
std::string_view display_name(AppraisalGrade g);

// Parsers accept the canonical identifier; they throw ValidationError otherwise.
StudyFactor parse_study_factor(std::string_view s);
ExplanationStyle parse_style(std::string_view s);
MetricId parse_metric(std::string_view s);

std::size_t index_of(ExplanationStyle s);
std::size_t index_of(MetricId m);
int ordinal(AppraisalGrade g);

/// Crisp ordinal link between a Likert score and its appraisal grade.
AppraisalGrade grade_of_score(int score);

bool is_valid_score(int score);
void require_score(int score, std::string_view what);

// ---------------------------------------------------------------------------
// Value types
// ---------------------------------------------------------------------------

struct Movie {
  MovieId movie_id;
  std::string title;
  std::string director;  // empty when unknown
  std::vector<std::string> actors;
  std::vector<std::string> genres;
  int year = 0;  // 0 when unknown

  friend bool operator==(const Movie&, const Movie&) = default;
};

struct ContextualFactor {
  StudyFactor factor_id;
  std::vector<ConditionId> vocabulary;

  bool contains(std::string_view condition) const;
  /// Throws ValidationError on an empty vocabulary or duplicate ids.
  void validate() const;

  friend bool operator==(const ContextualFactor&, const ContextualFactor&) = default;
};

/// Default vocabularies for the four study factors, in schema order.
std::vector<ContextualFactor> default_study_factors();

/// An assignment of conditions to (a subset of) the study factors.
class ContextualSituation {
 public:
  ContextualSituation() = default;
  ContextualSituation(std::initializer_list<std::pair<const StudyFactor, ConditionId>> init)
      : assignments_(init) {}

  void assign(StudyFactor f, ConditionId c) { assignments_[f] = std::move(c); }
  void clear(StudyFactor f) { assignments_.erase(f); }

  std::optional<ConditionId> get(StudyFactor f) const;
  bool has(StudyFactor f) const { return assignments_.contains(f); }

  /// True when all four study factors are assigned.
  bool is_complete() const;
  bool empty() const { return assignments_.empty(); }
  std::size_t size() const { return assignments_.size(); }

  const std::map<StudyFactor, ConditionId>& assignments() const { return assignments_; }

  /// Every assigned condition must belong to its factor's vocabulary.
  void validate_against(const std::vector<ContextualFactor>& schema) const;

  friend bool operator==(const ContextualSituation&, const ContextualSituation&) = default;
  friend auto operator<=>(const ContextualSituation&, const ContextualSituation&) = default;

 private:
  std::map<StudyFactor, ConditionId> assignments_;
};

struct ContextualRating {
  UserId user_id;
  MovieId movie_id;
  int score = 0;
  ContextualSituation situation;
  /// Non-study contextual columns, stored verbatim.
  std::map<std::string, std::string> extra_context;
  std::int64_t timestamp = 0;

  friend bool operator==(const ContextualRating&, const ContextualRating&) = default;
};

struct Demographics {
  std::string age_band;
  std::string gender;
  std::string education;
  std::string occupation;
  std::string watch_frequency;

  friend bool operator==(const Demographics&, const Demographics&) = default;
};

}  // namespace expleval
