#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "expleval/dataset.hpp"
#include "expleval/domain.hpp"
#include "expleval/explanation.hpp"
#include "expleval/recommender.hpp"

namespace expleval {

inline constexpr std::size_t kSeedTaskCount = 12;
inline constexpr std::size_t kTrialCount = 6;
inline constexpr std::size_t kLikertCount = 36;
/// Server-side cap on a reported decision time.
inline constexpr std::int64_t kMaxDecisionMs = 10 * 60 * 1000;

enum class Phase { SeedRating, Trials, Questionnaire, Complete };

std::string_view to_string(Phase p);
Phase parse_phase(std::string_view s);

struct SeedTask {
  MovieId movie_id;
  ContextualSituation situation;
  std::optional<int> score;

  friend bool operator==(const SeedTask&, const SeedTask&) = default;
};

struct TrialRecord {
  ExplanationStyle style = ExplanationStyle::Avg;
  MovieId movie_id;
  Explanation explanation;
  std::optional<int> r;
  std::optional<std::int64_t> t_ms;
  std::optional<int> r_prime;
  /// Set when the movie list or the explanation needed a fallback.
  std::optional<std::string> diagnostic;

  bool complete() const { return r && t_ms && r_prime; }
  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct LikertResponse {
  ExplanationStyle style = ExplanationStyle::Avg;
  MetricId metric = MetricId::Efficiency;
  int score = 0;

  friend bool operator==(const LikertResponse&, const LikertResponse&) = default;
};

struct Session {
  std::string session_id;
  Demographics participant;
  Phase phase = Phase::SeedRating;
  std::vector<SeedTask> seed_tasks;
  std::optional<ContextualSituation> target_situation;
  std::vector<TrialRecord> trials;
  std::vector<LikertResponse> likert;
  std::uint64_t rng_seed = 0;

  /// Identity of the participant inside the session-local dataset.
  UserId participant_user() const { return "participant:" + session_id; }
  std::size_t answered_seed_count() const;
  std::optional<std::size_t> next_unanswered_seed() const;
  /// First trial that is not complete.
  std::optional<std::size_t> current_trial() const;
  bool has_likert(ExplanationStyle s, MetricId m) const;
  /// Next unanswered (style, metric) cell in canonical order.
  std::optional<std::pair<ExplanationStyle, MetricId>> next_likert_cell() const;
  /// Checks the structural invariants of a Complete session.
  bool is_complete() const;

  friend bool operator==(const Session&, const Session&) = default;
};

/// Everything a session needs from the running study: the base dataset, the
/// recommender artifacts built from it, and the phrase table.
struct StudyContext {
  const Dataset& dataset;
  const RecommenderModel& model;
  const PhraseTable& phrases;
};

/// Samples 12 distinct movies and a contextual situation for each.
Session start_session(const Dataset& ds, std::string session_id, Demographics participant, std::uint64_t rng_seed);

/// Stores a seed score without advancing the phase.
Session store_seed_rating(Session s, std::size_t task_index, int score);

/// Stores a seed score; the twelfth answer runs begin_trials.
Session submit_seed_rating(Session s, std::size_t task_index, int score, const StudyContext& ctx);

/// Draws the target situation, recommends on the session-local dataset and
/// assigns one recommended movie to each explanation style.
Session begin_trials(Session s, const StudyContext& ctx);

Session record_explanation_rating(Session s, std::size_t trial_index, int r, std::int64_t t_ms);
Session record_detail_rating(Session s, std::size_t trial_index, int r_prime);
Session submit_likert(Session s, ExplanationStyle style, MetricId metric, int score);

/// Base dataset plus the session's answered seed ratings under the
/// participant's user id.
Dataset session_dataset(const Session& s, const Dataset& base);

}  // namespace expleval
