#include "expleval/protocol.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "expleval/errors.hpp"
#include "expleval/log.hpp"
#include "expleval/random.hpp"

namespace expleval {

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::SeedRating: return "SeedRating";
    case Phase::Trials: return "Trials";
    case Phase::Questionnaire: return "Questionnaire";
    case Phase::Complete: return "Complete";
  }
  return "?";
}

Phase parse_phase(std::string_view s) {
  for (auto p : {Phase::SeedRating, Phase::Trials, Phase::Questionnaire, Phase::Complete}) {
    if (to_string(p) == s) return p;
  }
  throw ValidationError("unknown phase '" + std::string(s) + "'");
}

std::size_t Session::answered_seed_count() const {
  return static_cast<std::size_t>(
      std::count_if(seed_tasks.begin(), seed_tasks.end(), [](const SeedTask& t) { return t.score.has_value(); }));
}

std::optional<std::size_t> Session::next_unanswered_seed() const {
  for (std::size_t i = 0; i < seed_tasks.size(); ++i) {
    if (!seed_tasks[i].score) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> Session::current_trial() const {
  for (std::size_t i = 0; i < trials.size(); ++i) {
    if (!trials[i].complete()) return i;
  }
  return std::nullopt;
}

bool Session::has_likert(ExplanationStyle s, MetricId m) const {
  return std::any_of(likert.begin(), likert.end(),
                     [&](const LikertResponse& l) { return l.style == s && l.metric == m; });
}

std::optional<std::pair<ExplanationStyle, MetricId>> Session::next_likert_cell() const {
  for (auto s : kAllStyles) {
    for (auto m : kAllMetrics) {
      if (!has_likert(s, m)) return std::pair{s, m};
    }
  }
  return std::nullopt;
}

bool Session::is_complete() const {
  if (phase != Phase::Complete) return false;
  if (seed_tasks.size() != kSeedTaskCount || answered_seed_count() != kSeedTaskCount) return false;
  if (trials.size() != kTrialCount) return false;
  if (!std::all_of(trials.begin(), trials.end(), [](const TrialRecord& t) { return t.complete(); })) return false;
  return likert.size() == kLikertCount && !next_likert_cell();
}

namespace {

void require_phase(const Session& s, Phase expected, std::string_view op) {
  if (s.phase != expected) {
    throw StateError(std::string(op) + ": session is in phase " + std::string(to_string(s.phase)) + ", expected " +
                     std::string(to_string(expected)));
  }
}

std::vector<ContextualSituation> observed_situations(const Dataset& ds) {
  std::set<ContextualSituation> seen;
  for (const auto& r : ds.ratings) {
    if (r.situation.is_complete()) seen.insert(r.situation);
  }
  return {seen.begin(), seen.end()};
}

ContextualSituation random_situation(const Dataset& ds, Rng& rng) {
  ContextualSituation s;
  for (auto f : kStudyFactors) {
    const auto& vocab = ds.factor(f).vocabulary;
    s.assign(f, vocab[rng.uniform_index(vocab.size())]);
  }
  return s;
}

}  // namespace

Session start_session(const Dataset& ds, std::string session_id, Demographics participant, std::uint64_t rng_seed) {
  if (ds.movies.size() < kSeedTaskCount) {
    throw InsufficientDataError("catalog has " + std::to_string(ds.movies.size()) + " movies; at least " +
                                std::to_string(kSeedTaskCount) + " are needed");
  }
  Session s;
  s.session_id = std::move(session_id);
  s.participant = std::move(participant);
  s.rng_seed = rng_seed;

  Rng rng(derive_seed(rng_seed, "seed-tasks"));
  std::vector<MovieId> ids;
  ids.reserve(ds.movies.size());
  for (const auto& [id, m] : ds.movies) ids.push_back(id);
  // Partial Fisher-Yates: the first 12 slots are a uniform sample without replacement.
  for (std::size_t i = 0; i < kSeedTaskCount; ++i) {
    std::swap(ids[i], ids[i + rng.uniform_index(ids.size() - i)]);
  }
  const auto situations = observed_situations(ds);
  for (std::size_t i = 0; i < kSeedTaskCount; ++i) {
    SeedTask t;
    t.movie_id = ids[i];
    t.situation = situations.empty() ? random_situation(ds, rng) : situations[rng.uniform_index(situations.size())];
    s.seed_tasks.push_back(std::move(t));
  }
  return s;
}

Session store_seed_rating(Session s, std::size_t task_index, int score) {
  require_phase(s, Phase::SeedRating, "seed rating");
  if (task_index >= s.seed_tasks.size()) {
    throw ValidationError("seed task index " + std::to_string(task_index) + " out of range");
  }
  require_score(score, "seed score");
  auto& task = s.seed_tasks[task_index];
  if (task.score) throw StateError("seed task " + std::to_string(task_index) + " is already answered");
  task.score = score;
  return s;
}

Session submit_seed_rating(Session s, std::size_t task_index, int score, const StudyContext& ctx) {
  s = store_seed_rating(std::move(s), task_index, score);
  if (s.answered_seed_count() == kSeedTaskCount) return begin_trials(std::move(s), ctx);
  return s;
}

Dataset session_dataset(const Session& s, const Dataset& base) {
  Dataset local = base;
  for (const auto& task : s.seed_tasks) {
    if (!task.score) continue;
    ContextualRating r;
    r.user_id = s.participant_user();
    r.movie_id = task.movie_id;
    r.score = *task.score;
    r.situation = task.situation;
    local.add_rating(std::move(r));
  }
  return local;
}

namespace {

/// Orders movies by rating count, then mean rating, then id.
std::vector<MovieId> popularity_order(const Dataset& ds) {
  std::map<MovieId, std::pair<std::size_t, double>> acc;
  for (const auto& r : ds.ratings) {
    auto& a = acc[r.movie_id];
    a.first += 1;
    a.second += r.score;
  }
  std::vector<std::pair<MovieId, std::pair<std::size_t, double>>> items(acc.begin(), acc.end());
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    const double ma = a.second.second / static_cast<double>(a.second.first);
    const double mb = b.second.second / static_cast<double>(b.second.first);
    if (a.second.first != b.second.first) return a.second.first > b.second.first;
    if (ma != mb) return ma > mb;
    return a.first < b.first;
  });
  std::vector<MovieId> out;
  for (auto& [id, stats] : items) out.push_back(id);
  return out;
}

class TrialAssigner {
 public:
  TrialAssigner(const Session& s, const Dataset& local_ds, const StudyContext& ctx)
      : session_(s), ds_(local_ds), ctx_(ctx), index_(local_ds) {
    for (const auto& t : s.seed_tasks) history_.push_back(local_ds.movie(t.movie_id));
    for (const auto& [user, sim] : index_.nearest_users(s.participant_user(), ctx.model.config().neighborhood_k)) {
      neighbours_.push_back(user);
    }
  }

  bool renderable(ExplanationStyle style, const MovieId& movie) const {
    switch (style) {
      case ExplanationStyle::Avg:
      case ExplanationStyle::Per: return !index_.scores_of(movie).empty();
      case ExplanationStyle::Simu:
        return std::any_of(neighbours_.begin(), neighbours_.end(),
                           [&](const UserId& u) { return index_.ratings_of(u).contains(movie); });
      case ExplanationStyle::Content: {
        const auto& m = ds_.movie(movie);
        return !m.director.empty() || !m.actors.empty();
      }
      case ExplanationStyle::Simi:
      case ExplanationStyle::ContextAware: return true;
    }
    return false;
  }

  TrialRecord render(ExplanationStyle style, const MovieId& movie) const {
    TrialRecord t;
    t.style = style;
    t.movie_id = movie;
    switch (style) {
      case ExplanationStyle::Avg: t.explanation = explain_avg(index_, movie); break;
      case ExplanationStyle::Per: t.explanation = explain_per(index_, movie); break;
      case ExplanationStyle::Simu: {
        auto out = explain_simu(index_, movie, session_.participant_user(), ctx_.model.config().neighborhood_k);
        t.explanation = std::move(out.explanation);
        t.diagnostic = std::move(out.diagnostic);
        break;
      }
      case ExplanationStyle::Simi: t.explanation = explain_simi(history_, ds_.movie(movie)); break;
      case ExplanationStyle::Content: t.explanation = explain_content(ds_.movie(movie)); break;
      case ExplanationStyle::ContextAware:
        t.explanation = explain_context_aware(*session_.target_situation, ctx_.phrases);
        break;
    }
    return t;
  }

 private:
  const Session& session_;
  const Dataset& ds_;
  const StudyContext& ctx_;
  RatingIndex index_;
  std::vector<Movie> history_;
  std::vector<UserId> neighbours_;
};

}  // namespace

Session begin_trials(Session s, const StudyContext& ctx) {
  require_phase(s, Phase::SeedRating, "begin trials");
  if (s.answered_seed_count() != kSeedTaskCount) {
    throw StateError("begin trials: " + std::to_string(s.answered_seed_count()) + " of 12 seed ratings present");
  }
  Rng rng(derive_seed(s.rng_seed, "trials"));
  s.target_situation = random_situation(ctx.dataset, rng);

  const Dataset local_ds = session_dataset(s, ctx.dataset);
  std::set<MovieId> seeds;
  for (const auto& t : s.seed_tasks) seeds.insert(t.movie_id);

  auto cfg = ctx.model.config();
  const auto local = select_local_dataset(local_ds, *s.target_situation, ctx.model.profiles(), cfg);

  // Ranked candidates: the whole local ranking, then popularity padding.
  std::vector<MovieId> ranked;
  cfg.top_n = local_ds.movies.size();
  try {
    for (auto& rec : recommend(local.ratings, s.participant_user(), seeds, cfg).items) ranked.push_back(rec.movie_id);
  } catch (const InsufficientDataError& e) {
    log::warn("session " + s.session_id + ": " + e.what());
  }
  std::set<MovieId> listed(ranked.begin(), ranked.end());
  std::set<MovieId> padded;
  const std::size_t from_recommender = ranked.size();
  for (auto& id : popularity_order(local_ds)) {
    if (!seeds.contains(id) && !listed.contains(id)) {
      listed.insert(id);
      padded.insert(id);
      ranked.push_back(std::move(id));
    }
  }
  if (ranked.size() < kTrialCount) {
    throw InsufficientDataError("only " + std::to_string(ranked.size()) + " unseen movies available for trials");
  }
  const std::string padding_note = "recommender produced " + std::to_string(from_recommender) +
                                   " items; movie taken from the popularity fallback";

  std::array<ExplanationStyle, kTrialCount> styles = kAllStyles;
  rng.shuffle(std::span<ExplanationStyle>(styles));

  // Trial i shows the i-th ranked movie with styles[i]. A pair that cannot be
  // rendered is repaired by swapping movies with another trial, then by
  // pulling the next ranked movie that supports the style.
  const TrialAssigner assigner(s, local_ds, ctx);
  std::vector<MovieId> movies(ranked.begin(), ranked.begin() + kTrialCount);
  std::size_t next_spare = kTrialCount;
  for (std::size_t i = 0; i < kTrialCount; ++i) {
    if (assigner.renderable(styles[i], movies[i])) continue;
    bool fixed = false;
    for (std::size_t j = 0; j < kTrialCount && !fixed; ++j) {
      if (j == i) continue;
      if (assigner.renderable(styles[i], movies[j]) && assigner.renderable(styles[j], movies[i])) {
        std::swap(movies[i], movies[j]);
        fixed = true;
      }
    }
    for (std::size_t k = next_spare; k < ranked.size() && !fixed; ++k) {
      if (assigner.renderable(styles[i], ranked[k])) {
        movies[i] = ranked[k];
        std::swap(ranked[k], ranked[next_spare]);
        ++next_spare;
        fixed = true;
      }
    }
    if (!fixed && styles[i] == ExplanationStyle::Content) {
      throw InsufficientDataError("no unseen movie has a director or actor for the Content explanation");
    }
  }

  s.trials.clear();
  for (std::size_t i = 0; i < kTrialCount; ++i) {
    auto trial = assigner.render(styles[i], movies[i]);
    if (!trial.diagnostic && padded.contains(trial.movie_id)) trial.diagnostic = padding_note;
    if (trial.diagnostic) log::info("session " + s.session_id + " trial " + std::to_string(i) + ": " + *trial.diagnostic);
    s.trials.push_back(std::move(trial));
  }
  s.phase = Phase::Trials;
  return s;
}

Session record_explanation_rating(Session s, std::size_t trial_index, int r, std::int64_t t_ms) {
  require_phase(s, Phase::Trials, "explanation rating");
  if (trial_index >= s.trials.size()) throw NotFoundError("trial " + std::to_string(trial_index) + " does not exist");
  require_score(r, "r");
  if (t_ms < 0) throw ValidationError("t_ms must be non-negative");
  if (t_ms > kMaxDecisionMs) throw ValidationError("t_ms exceeds the 10 minute cap");
  auto current = s.current_trial();
  if (current && *current < trial_index) {
    throw StateError("trial " + std::to_string(*current) + " must be completed before trial " +
                     std::to_string(trial_index));
  }
  auto& t = s.trials[trial_index];
  if (t.r) throw StateError("trial " + std::to_string(trial_index) + " already has an explanation rating");
  t.r = r;
  t.t_ms = t_ms;
  return s;
}

Session record_detail_rating(Session s, std::size_t trial_index, int r_prime) {
  require_phase(s, Phase::Trials, "detail rating");
  if (trial_index >= s.trials.size()) throw NotFoundError("trial " + std::to_string(trial_index) + " does not exist");
  require_score(r_prime, "r_prime");
  auto& t = s.trials[trial_index];
  if (!t.r) throw StateError("trial " + std::to_string(trial_index) + " needs its explanation rating first");
  if (t.r_prime) throw StateError("trial " + std::to_string(trial_index) + " already has a detail rating");
  t.r_prime = r_prime;
  if (!s.current_trial()) s.phase = Phase::Questionnaire;
  return s;
}

Session submit_likert(Session s, ExplanationStyle style, MetricId metric, int score) {
  require_phase(s, Phase::Questionnaire, "likert");
  require_score(score, "likert score");
  if (s.has_likert(style, metric)) {
    throw StateError("likert cell (" + std::string(to_string(style)) + ", " + std::string(to_string(metric)) +
                     ") is already answered");
  }
  s.likert.push_back({style, metric, score});
  if (s.likert.size() == kLikertCount) s.phase = Phase::Complete;
  return s;
}

}  // namespace expleval
