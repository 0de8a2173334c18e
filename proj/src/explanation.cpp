#include "expleval/explanation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

#include "expleval/errors.hpp"

namespace expleval {

double round_half_up(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::floor(value * scale + 0.5 + 1e-9) / scale;
}

namespace {

std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string join_and(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += (i + 1 == items.size()) ? " and " : ", ";
    out += items[i];
  }
  return out;
}

// Mean of integer scores rounded half-up to one decimal, computed exactly.
double mean_one_decimal(const std::vector<int>& scores) {
  const long long sum = std::accumulate(scores.begin(), scores.end(), 0LL);
  const long long n = static_cast<long long>(scores.size());
  const long long tenths = (20 * sum + n) / (2 * n);  // floor(10*sum/n + 1/2)
  return static_cast<double>(tenths) / 10.0;
}

}  // namespace

// ---------------------------------------------------------------------------
// Phrase table
// ---------------------------------------------------------------------------

PhraseTable PhraseTable::defaults() {
  PhraseTable t;
  t.set(StudyFactor::Weather, "sunny", "it shines");
  t.set(StudyFactor::Weather, "rainy", "it rains");
  t.set(StudyFactor::Weather, "stormy", "it storms");
  t.set(StudyFactor::Weather, "snowy", "it snows");
  t.set(StudyFactor::Weather, "cloudy", "it is cloudy");
  t.set(StudyFactor::PhysicalWellness, "healthy", "healthy");
  t.set(StudyFactor::PhysicalWellness, "ill", "ill");
  t.set(StudyFactor::Location, "home", "you are at home");
  t.set(StudyFactor::Location, "public", "you are in a public place");
  t.set(StudyFactor::Location, "friends_house", "you are at a friend's house");
  t.set(StudyFactor::Mood, "positive", "in good moods");
  t.set(StudyFactor::Mood, "neutral", "in neutral moods");
  t.set(StudyFactor::Mood, "negative", "in bad moods");
  return t;
}

PhraseTable PhraseTable::from_document(const KvDocument& doc) {
  auto t = defaults();
  for (const auto& section : doc.sections()) {
    if (section.empty()) continue;
    const auto factor = parse_study_factor(section);
    for (const auto& [condition, phrase] : doc.entries(section)) {
      if (phrase.empty()) throw ValidationError("empty phrase for " + section + "." + condition);
      t.set(factor, condition, phrase);
    }
  }
  return t;
}

void PhraseTable::set(StudyFactor f, const ConditionId& c, std::string phrase) {
  phrases_[ConditionKey{f, c}] = std::move(phrase);
}

std::string PhraseTable::phrase(StudyFactor f, const ConditionId& c) const {
  if (auto it = phrases_.find(ConditionKey{f, c}); it != phrases_.end()) return it->second;
  std::string out = c;
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

// ---------------------------------------------------------------------------
// Rating index
// ---------------------------------------------------------------------------

RatingIndex::RatingIndex(const Dataset& ds) {
  std::map<std::pair<UserId, MovieId>, std::pair<double, int>> acc;
  for (const auto& r : ds.ratings) {
    scores_[r.movie_id].push_back(r.score);
    auto& a = acc[{r.user_id, r.movie_id}];
    a.first += r.score;
    a.second += 1;
  }
  for (const auto& [key, sc] : acc) by_user_[key.first][key.second] = sc.first / sc.second;
}

const std::vector<int>& RatingIndex::scores_of(const MovieId& movie) const {
  static const std::vector<int> kEmpty;
  auto it = scores_.find(movie);
  return it == scores_.end() ? kEmpty : it->second;
}

const std::map<MovieId, double>& RatingIndex::ratings_of(const UserId& user) const {
  static const std::map<MovieId, double> kEmpty;
  auto it = by_user_.find(user);
  return it == by_user_.end() ? kEmpty : it->second;
}

std::optional<double> RatingIndex::user_similarity(const UserId& a, const UserId& b) const {
  const auto& ra = ratings_of(a);
  const auto& rb = ratings_of(b);
  std::vector<double> x, y;
  for (const auto& [movie, score] : ra) {
    if (auto it = rb.find(movie); it != rb.end()) {
      x.push_back(score);
      y.push_back(it->second);
    }
  }
  if (x.size() < 2) return std::nullopt;
  return pearson(x, y);
}

std::vector<std::pair<UserId, double>> RatingIndex::nearest_users(const UserId& user, std::size_t k) const {
  std::vector<std::pair<UserId, double>> out;
  for (const auto& [other, ratings] : by_user_) {
    if (other == user) continue;
    auto s = user_similarity(user, other);
    if (s && *s > 0.0) out.emplace_back(other, *s);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (out.size() > k) out.resize(k);
  return out;
}

// ---------------------------------------------------------------------------
// Styles
// ---------------------------------------------------------------------------

Explanation explain_avg(const RatingIndex& index, const MovieId& movie) {
  const auto& scores = index.scores_of(movie);
  if (scores.empty()) throw ValidationError("Avg explanation needs at least one rating of '" + movie + "'");
  const double avg = mean_one_decimal(scores);
  Explanation e;
  e.style = ExplanationStyle::Avg;
  e.text = "The average rating of this movie is " + format_fixed(avg, 1);
  e.evidence["avg_rating"] = avg;
  e.evidence["n_ratings"] = static_cast<double>(scores.size());
  return e;
}

Explanation explain_per(const RatingIndex& index, const MovieId& movie, int threshold) {
  const auto& scores = index.scores_of(movie);
  if (scores.empty()) throw ValidationError("Per explanation needs at least one rating of '" + movie + "'");
  // "more than <threshold>" is rendered verbatim but counts scores >= threshold.
  const auto above = std::count_if(scores.begin(), scores.end(), [threshold](int s) { return s >= threshold; });
  const long long n = static_cast<long long>(scores.size());
  const long long pct = (200 * above + n) / (2 * n);
  Explanation e;
  e.style = ExplanationStyle::Per;
  e.text = std::to_string(pct) + " percent of users rate this movie more than " + std::to_string(threshold);
  e.evidence["pct_above"] = static_cast<double>(pct);
  e.evidence["threshold"] = static_cast<double>(threshold);
  e.evidence["n_ratings"] = static_cast<double>(n);
  return e;
}

SimuOutcome explain_simu(const RatingIndex& index, const MovieId& movie, const UserId& user, std::size_t k) {
  std::vector<double> neighbour_scores;
  std::vector<std::string> neighbours;
  for (const auto& [other, sim] : index.nearest_users(user, k)) {
    const auto& ratings = index.ratings_of(other);
    if (auto it = ratings.find(movie); it != ratings.end()) {
      neighbour_scores.push_back(it->second);
      neighbours.push_back(other);
    }
  }
  SimuOutcome out;
  if (neighbour_scores.empty()) {
    out.explanation = explain_avg(index, movie);
    out.diagnostic = "no similar user of '" + user + "' rated '" + movie + "'; using the average-rating wording";
    return out;
  }
  const double mean = std::accumulate(neighbour_scores.begin(), neighbour_scores.end(), 0.0) /
                      static_cast<double>(neighbour_scores.size());
  const double shown = round_half_up(mean, 1);
  Explanation& e = out.explanation;
  e.style = ExplanationStyle::Simu;
  e.text = "The average rating of users whose preferences are similar to yours is " + format_fixed(shown, 1);
  e.evidence["simu_avg"] = shown;
  e.evidence["n_neighbours"] = static_cast<double>(neighbours.size());
  e.evidence["neighbours"] = std::move(neighbours);
  return out;
}

double genre_jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  const std::set<std::string> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::size_t inter = 0;
  for (const auto& g : sa) inter += sb.count(g);
  const std::size_t uni = sa.size() + sb.size() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

Explanation explain_simi(std::span<const Movie> history, const Movie& movie) {
  if (history.empty()) throw ValidationError("Simi explanation needs a non-empty viewing history");
  std::vector<std::pair<double, std::size_t>> ranked;
  for (std::size_t i = 0; i < history.size(); ++i) ranked.emplace_back(genre_jaccard(history[i].genres, movie.genres), i);
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<std::string> similar;
  for (std::size_t i = 0; i < ranked.size() && i < 3; ++i) similar.push_back(history[ranked[i].second].movie_id);
  Explanation e;
  e.style = ExplanationStyle::Simi;
  e.text = "This movie is similar to movies you watched before";
  e.evidence["similar_movies"] = std::move(similar);
  return e;
}

Explanation explain_content(const Movie& movie) {
  std::vector<std::string> actors(movie.actors.begin(),
                                  movie.actors.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(2, movie.actors.size())));
  if (movie.director.empty() && actors.empty()) {
    throw ValidationError("Content explanation needs a director or an actor for '" + movie.movie_id + "'");
  }
  Explanation e;
  e.style = ExplanationStyle::Content;
  e.text = "This is a movie";
  if (!movie.director.empty()) {
    e.text += " directed by " + movie.director;
    e.evidence["director"] = movie.director;
  }
  if (!actors.empty()) {
    e.text += (movie.director.empty() ? " acted by " : " and acted by ") + join_and(actors);
    e.evidence["actors"] = actors;
  }
  return e;
}

Explanation explain_context_aware(const ContextualSituation& situation, const PhraseTable& phrases) {
  auto phrase_for = [&](StudyFactor f) {
    auto c = situation.get(f);
    if (!c) throw ValidationError("context-aware explanation: " + std::string(to_string(f)) + " is not assigned");
    return phrases.phrase(f, *c);
  };
  const auto weather = phrase_for(StudyFactor::Weather);
  const auto wellness = phrase_for(StudyFactor::PhysicalWellness);
  const auto location = phrase_for(StudyFactor::Location);
  const auto mood = phrase_for(StudyFactor::Mood);
  Explanation e;
  e.style = ExplanationStyle::ContextAware;
  e.text = "The system suppose that you would like to watch this movie when " + weather + ", " + wellness + " " +
           location + " and " + mood;
  for (auto f : kStudyFactors) e.evidence[std::string(to_string(f))] = *situation.get(f);
  return e;
}

}  // namespace expleval
