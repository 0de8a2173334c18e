#include "expleval/recommender.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "expleval/errors.hpp"
#include "expleval/log.hpp"

namespace expleval {

std::string_view to_string(Linkage l) {
  switch (l) {
    case Linkage::Average: return "average";
    case Linkage::Complete: return "complete";
    case Linkage::Single: return "single";
  }
  return "?";
}

Linkage parse_linkage(std::string_view s) {
  for (auto l : {Linkage::Average, Linkage::Complete, Linkage::Single}) {
    if (to_string(l) == s) return l;
  }
  throw ValidationError("unknown linkage '" + std::string(s) + "'");
}

void RecommenderConfig::validate() const {
  if (n_clusters < 1) throw ValidationError("n_clusters must be >= 1");
  if (!(similarity_threshold >= -1.0 && similarity_threshold <= 1.0)) {
    throw ValidationError("similarity_threshold must be in [-1,1]");
  }
  if (neighborhood_k < 1) throw ValidationError("neighborhood_k must be >= 1");
  if (top_n < 1) throw ValidationError("top_n must be >= 1");
}

RecommenderConfig RecommenderConfig::from_document(const KvDocument& doc) {
  RecommenderConfig cfg;
  auto to_size = [](const std::string& key, const std::string& v) {
    try {
      std::size_t pos = 0;
      auto n = std::stoll(v, &pos);
      if (pos != v.size() || n < 0) throw std::invalid_argument(v);
      return static_cast<std::size_t>(n);
    } catch (const std::exception&) {
      throw ValidationError("recommender." + key + ": expected a non-negative integer, got '" + v + "'");
    }
  };
  for (const auto& [key, value] : doc.entries("recommender")) {
    if (key == "n_clusters") cfg.n_clusters = to_size(key, value);
    else if (key == "linkage") cfg.linkage = parse_linkage(value);
    else if (key == "similarity_threshold") {
      try {
        cfg.similarity_threshold = std::stod(value);
      } catch (const std::exception&) {
        throw ValidationError("recommender.similarity_threshold: expected a number, got '" + value + "'");
      }
    } else if (key == "neighborhood_k") cfg.neighborhood_k = to_size(key, value);
    else if (key == "top_n") cfg.top_n = to_size(key, value);
    else if (key == "min_local_ratings") cfg.min_local_ratings = to_size(key, value);
    else throw ValidationError("unknown recommender key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw ValidationError("pearson: length mismatch (" + std::to_string(x.size()) + " vs " +
                          std::to_string(y.size()) + ")");
  }
  if (x.size() < 2) throw ValidationError("pearson: need at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / (std::sqrt(sxx) * std::sqrt(syy)), -1.0, 1.0);
}

ConditionProfiles condition_profiles(const Dataset& ds, const ClusterAssignment& ca) {
  // Ratings grouped by cluster, in dataset order.
  std::vector<std::vector<const ContextualRating*>> by_cluster(ca.n_clusters);
  for (const auto& r : ds.ratings) {
    auto it = ca.cluster_of.find(r.movie_id);
    if (it != ca.cluster_of.end()) by_cluster[it->second].push_back(&r);
  }
  ConditionProfiles profiles;
  for (const auto& factor : ds.factors) {
    for (const auto& condition : factor.vocabulary) {
      ConditionProfile p;
      p.pcc_by_cluster.resize(ca.n_clusters);
      for (std::size_t g = 0; g < ca.n_clusters; ++g) {
        const auto& ratings = by_cluster[g];
        if (ratings.size() < 2) continue;
        std::vector<double> indicator, score;
        indicator.reserve(ratings.size());
        score.reserve(ratings.size());
        for (const auto* r : ratings) {
          auto assigned = r->situation.get(factor.factor_id);
          indicator.push_back(assigned && *assigned == condition ? 1.0 : 0.0);
          score.push_back(r->score);
        }
        p.pcc_by_cluster[g] = pearson(indicator, score);
      }
      profiles.emplace(ConditionKey{factor.factor_id, condition}, std::move(p));
    }
  }
  return profiles;
}

std::optional<std::vector<double>> situation_representation(const ContextualSituation& s,
                                                             const ConditionProfiles& profiles) {
  std::optional<std::vector<double>> sum;
  std::size_t count = 0;
  for (const auto& [factor, condition] : s.assignments()) {
    auto it = profiles.find(ConditionKey{factor, condition});
    if (it == profiles.end()) continue;
    const auto& pcc = it->second.pcc_by_cluster;
    if (!sum) sum.emplace(pcc.size(), 0.0);
    for (std::size_t g = 0; g < pcc.size(); ++g) (*sum)[g] += pcc[g].value_or(0.0);
    ++count;
  }
  if (sum) {
    for (auto& v : *sum) v /= static_cast<double>(count);
  }
  return sum;
}

namespace {

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

}  // namespace

double situation_similarity(const ContextualSituation& a, const ContextualSituation& b,
                            const ConditionProfiles& profiles) {
  auto ra = situation_representation(a, profiles);
  auto rb = situation_representation(b, profiles);
  if (!ra || !rb) throw ValidationError("situation assigns no profiled condition");
  return cosine(*ra, *rb);
}

ThresholdSelection select_by_similarity(std::span<const std::optional<double>> sims, double theta,
                                        std::size_t floor) {
  ThresholdSelection sel;
  sel.requested_theta = theta;
  auto pick = [&](double t) {
    sel.indices.clear();
    for (std::size_t i = 0; i < sims.size(); ++i) {
      if (sims[i] && *sims[i] >= t) sel.indices.push_back(i);
    }
  };
  // Steps are counted, not accumulated, so theta - 0.1k carries no drift.
  for (int step = 0;; ++step) {
    double t = theta - 0.1 * step;
    if (t <= -1.0 + 1e-12) {
      sel.effective_theta = -1.0;
      sel.relaxed = step > 0;
      sel.used_full = true;
      sel.indices.resize(sims.size());
      std::iota(sel.indices.begin(), sel.indices.end(), std::size_t{0});
      return sel;
    }
    pick(t);
    if (sel.indices.size() >= floor) {
      sel.effective_theta = t;
      sel.relaxed = step > 0;
      return sel;
    }
  }
}

LocalDataset select_local_dataset(const Dataset& ds, const ContextualSituation& target,
                                  const ConditionProfiles& profiles, const RecommenderConfig& cfg) {
  auto target_rep = situation_representation(target, profiles);
  if (!target_rep) throw ValidationError("target situation assigns no profiled condition");
  std::vector<std::optional<double>> sims;
  sims.reserve(ds.ratings.size());
  // Ratings with identical study-factor assignments share one representation.
  std::map<ContextualSituation, std::optional<double>> cache;
  for (const auto& r : ds.ratings) {
    auto [it, inserted] = cache.try_emplace(r.situation);
    if (inserted) {
      if (auto rep = situation_representation(r.situation, profiles)) it->second = cosine(*target_rep, *rep);
    }
    sims.push_back(it->second);
  }
  LocalDataset local;
  local.selection = select_by_similarity(sims, cfg.similarity_threshold, cfg.min_local_ratings);
  local.ratings.reserve(local.selection.indices.size());
  for (auto i : local.selection.indices) local.ratings.push_back(ds.ratings[i]);

  std::ostringstream msg;
  msg << "local dataset: " << local.ratings.size() << " ratings, theta " << cfg.similarity_threshold
      << " -> effective " << local.selection.effective_theta << (local.selection.used_full ? " (full dataset)" : "");
  log::info(msg.str());
  return local;
}

namespace {

struct LocalIndex {
  // user -> movie -> mean rating
  std::map<UserId, std::map<MovieId, double>> by_user;
  // movie -> user -> mean rating
  std::map<MovieId, std::map<UserId, double>> by_item;
  std::map<MovieId, double> item_mean;  // over raw ratings
  std::map<MovieId, std::size_t> item_count;

  explicit LocalIndex(std::span<const ContextualRating> local) {
    std::map<std::pair<UserId, MovieId>, std::pair<double, int>> acc;
    std::map<MovieId, double> sums;
    for (const auto& r : local) {
      auto& a = acc[{r.user_id, r.movie_id}];
      a.first += r.score;
      a.second += 1;
      sums[r.movie_id] += r.score;
      item_count[r.movie_id] += 1;
    }
    for (const auto& [key, sc] : acc) {
      const double mean = sc.first / sc.second;
      by_user[key.first][key.second] = mean;
      by_item[key.second][key.first] = mean;
    }
    for (const auto& [movie, sum] : sums) item_mean[movie] = sum / static_cast<double>(item_count[movie]);
  }

  std::optional<double> item_similarity(const MovieId& i, const MovieId& j) const {
    const auto& ui = by_item.at(i);
    const auto& uj = by_item.at(j);
    std::vector<double> x, y;
    for (const auto& [user, ri] : ui) {
      auto it = uj.find(user);
      if (it == uj.end()) continue;
      x.push_back(ri);
      y.push_back(it->second);
    }
    if (x.size() < 2) return std::nullopt;
    return pearson(x, y);
  }
};

}  // namespace

RecommendationResult recommend(std::span<const ContextualRating> local, const UserId& user,
                               const std::set<MovieId>& exclude, const RecommenderConfig& cfg) {
  if (local.empty()) throw ValidationError("recommend: local dataset is empty");
  const LocalIndex index(local);

  static const std::map<MovieId, double> kNoRatings;
  auto user_it = index.by_user.find(user);
  const auto& rated = user_it == index.by_user.end() ? kNoRatings : user_it->second;

  RecommendationResult result;
  result.cold_start = rated.empty();
  std::vector<Recommendation> candidates;
  for (const auto& [movie, mean] : index.item_mean) {
    if (exclude.contains(movie) || rated.contains(movie)) continue;
    double predicted = mean;
    if (!result.cold_start) {
      std::vector<std::pair<double, MovieId>> neighbours;
      for (const auto& [other, r] : rated) {
        if (auto s = index.item_similarity(movie, other)) neighbours.emplace_back(*s, other);
      }
      std::sort(neighbours.begin(), neighbours.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
      });
      if (neighbours.size() > cfg.neighborhood_k) neighbours.resize(cfg.neighborhood_k);
      double num = 0.0, den = 0.0;
      for (const auto& [s, other] : neighbours) {
        num += s * (rated.at(other) - index.item_mean.at(other));
        den += std::abs(s);
      }
      if (den > 0.0) predicted = mean + num / den;
    }
    candidates.push_back({movie, std::clamp(predicted, double(kMinScore), double(kMaxScore))});
  }
  if (candidates.empty()) {
    throw InsufficientDataError("recommend: no candidate items left for user '" + user + "'");
  }
  std::sort(candidates.begin(), candidates.end(), [&](const Recommendation& a, const Recommendation& b) {
    if (a.predicted != b.predicted) return a.predicted > b.predicted;
    const auto ca = index.item_count.at(a.movie_id);
    const auto cb = index.item_count.at(b.movie_id);
    if (ca != cb) return ca > cb;
    return a.movie_id < b.movie_id;
  });
  if (candidates.size() > cfg.top_n) candidates.resize(cfg.top_n);
  result.items = std::move(candidates);
  if (result.cold_start) log::info("recommend: cold-start fallback for user '" + user + "'");
  return result;
}

RecommenderModel::RecommenderModel(const Dataset& ds, RecommenderConfig cfg) : config_(std::move(cfg)) {
  config_.validate();
  clusters_ = cluster_items(ds, config_);
  profiles_ = condition_profiles(ds, clusters_);
}

}  // namespace expleval
