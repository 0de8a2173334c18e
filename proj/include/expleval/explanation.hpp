#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "expleval/dataset.hpp"
#include "expleval/domain.hpp"
#include "expleval/kv_document.hpp"
#include "expleval/recommender.hpp"

namespace expleval {

using EvidenceValue = std::variant<double, std::string, std::vector<std::string>>;
using Evidence = std::map<std::string, EvidenceValue>;

struct Explanation {
  ExplanationStyle style = ExplanationStyle::Avg;
  std::string text;
  Evidence evidence;

  friend bool operator==(const Explanation&, const Explanation&) = default;
};

/// Half-up rounding to `decimals` places, tolerant of binary representation
/// error (3.75 -> 3.8, 4.05 -> 4.1).
double round_half_up(double value, int decimals);

/// Phrase rendered for each (factor, condition) in context-aware explanations.
class PhraseTable {
 public:
  static PhraseTable defaults();
  /// Sections are factor names, keys are condition ids. Entries override the defaults.
  static PhraseTable from_document(const KvDocument& doc);

  void set(StudyFactor f, const ConditionId& c, std::string phrase);
  /// Falls back to the condition id with underscores as spaces.
  std::string phrase(StudyFactor f, const ConditionId& c) const;

 private:
  std::map<ConditionKey, std::string> phrases_;
};

/// User x movie mean ratings over a dataset, for neighbourhood lookups.
class RatingIndex {
 public:
  explicit RatingIndex(const Dataset& ds);

  /// Raw scores of a movie, in dataset order.
  const std::vector<int>& scores_of(const MovieId& movie) const;
  /// Movie -> mean score for one user; empty when the user is unknown.
  const std::map<MovieId, double>& ratings_of(const UserId& user) const;

  /// PCC over co-rated movies; nullopt below two co-ratings or at zero variance.
  std::optional<double> user_similarity(const UserId& a, const UserId& b) const;
  /// The k users most similar to `user` (positive similarity only), most similar first.
  std::vector<std::pair<UserId, double>> nearest_users(const UserId& user, std::size_t k) const;

 private:
  std::map<MovieId, std::vector<int>> scores_;
  std::map<UserId, std::map<MovieId, double>> by_user_;
};

Explanation explain_avg(const RatingIndex& index, const MovieId& movie);
Explanation explain_per(const RatingIndex& index, const MovieId& movie, int threshold = 4);

struct SimuOutcome {
  Explanation explanation;
  /// Set when no neighbour rated the movie; the explanation then carries the
  /// Avg wording and style.
  std::optional<std::string> diagnostic;
};

SimuOutcome explain_simu(const RatingIndex& index, const MovieId& movie, const UserId& user, std::size_t k);
Explanation explain_simi(std::span<const Movie> user_history, const Movie& movie);
Explanation explain_content(const Movie& movie);
Explanation explain_context_aware(const ContextualSituation& situation,
                                  const PhraseTable& phrases = PhraseTable::defaults());

/// Jaccard index of two genre lists; 0 when both are empty.
double genre_jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b);

}  // namespace expleval
