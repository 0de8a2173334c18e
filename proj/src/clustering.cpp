#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "expleval/errors.hpp"
#include "expleval/recommender.hpp"

namespace expleval {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

double lance_williams(Linkage linkage, double d_ak, double d_bk, std::size_t size_a, std::size_t size_b) {
  switch (linkage) {
    case Linkage::Single: return std::min(d_ak, d_bk);
    case Linkage::Complete: return std::max(d_ak, d_bk);
    case Linkage::Average: {
      const double na = static_cast<double>(size_a);
      const double nb = static_cast<double>(size_b);
      return (na * d_ak + nb * d_bk) / (na + nb);
    }
  }
  return d_ak;
}

}  // namespace

// Nearest-neighbor chain. All three linkages are reducible, so sorting the
// recorded merges by distance yields the same dendrogram as greedy merging.
std::vector<Merge> agglomerate(std::vector<double> d, std::size_t n, Linkage linkage) {
  if (d.size() != n * n) throw ValidationError("distance matrix size mismatch");
  std::vector<Merge> merges;
  if (n < 2) return merges;
  merges.reserve(n - 1);

  std::vector<bool> active(n, true);
  std::vector<std::size_t> size(n, 1);
  std::vector<std::size_t> chain;
  chain.reserve(n);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return d[i * n + j]; };

  for (std::size_t remaining = n; remaining > 1;) {
    if (chain.empty()) {
      chain.push_back(static_cast<std::size_t>(std::find(active.begin(), active.end(), true) - active.begin()));
    }
    const std::size_t a = chain.back();
    const std::size_t prev = chain.size() >= 2 ? chain[chain.size() - 2] : n;
    std::size_t best = prev;
    double best_d = prev < n ? at(a, prev) : std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == a) continue;
      if (at(a, k) < best_d) {
        best_d = at(a, k);
        best = k;
      }
    }
    if (best == prev) {
      chain.pop_back();
      chain.pop_back();
      const std::size_t keep = std::min(a, prev);
      const std::size_t drop = std::max(a, prev);
      merges.push_back({keep, drop, best_d});
      for (std::size_t k = 0; k < n; ++k) {
        if (!active[k] || k == keep || k == drop) continue;
        const double nd = lance_williams(linkage, at(keep, k), at(drop, k), size[keep], size[drop]);
        at(keep, k) = nd;
        at(k, keep) = nd;
      }
      size[keep] += size[drop];
      active[drop] = false;
      --remaining;
      // Chain entries stay valid: `keep` replaces the merged pair and any
      // remaining chain member still points at an active cluster.
    } else {
      chain.push_back(best);
    }
  }
  std::stable_sort(merges.begin(), merges.end(),
                   [](const Merge& x, const Merge& y) { return x.distance < y.distance; });
  return merges;
}

std::vector<std::size_t> cut_dendrogram(const std::vector<Merge>& merges, std::size_t n, std::size_t k) {
  if (k == 0 || k > n) throw ValidationError("cannot cut " + std::to_string(n) + " leaves into " + std::to_string(k));
  DisjointSets sets(n);
  std::size_t clusters = n;
  for (const auto& m : merges) {
    if (clusters == k) break;
    if (sets.unite(m.a, m.b)) --clusters;
  }
  std::vector<std::size_t> label(n);
  std::unordered_map<std::size_t, std::size_t> root_label;
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, inserted] = root_label.try_emplace(sets.find(i), root_label.size());
    label[i] = it->second;
  }
  return label;
}

ClusterAssignment cluster_items(const Dataset& ds, const RecommenderConfig& cfg) {
  // Per-(user, movie) mean rating; movies indexed in id order so that the
  // result does not depend on rating order.
  std::map<MovieId, std::map<UserId, std::pair<double, int>>> acc;
  for (const auto& r : ds.ratings) {
    auto& cell = acc[r.movie_id][r.user_id];
    cell.first += r.score;
    cell.second += 1;
  }
  const std::size_t n = acc.size();
  if (n < cfg.n_clusters) {
    throw ValidationError("only " + std::to_string(n) + " rated movies for " + std::to_string(cfg.n_clusters) +
                          " clusters; lower n_clusters");
  }

  std::vector<MovieId> ids;
  ids.reserve(n);
  std::map<UserId, std::vector<std::pair<std::size_t, double>>> by_user;
  for (const auto& [movie, users] : acc) {
    const std::size_t idx = ids.size();
    ids.push_back(movie);
    for (const auto& [user, sum_count] : users) {
      by_user[user].emplace_back(idx, sum_count.first / sum_count.second);
    }
  }

  // Co-rater sums: dot[i][j], and squared norms of i and j restricted to co-raters.
  std::vector<double> dot(n * n, 0.0), sq_i(n * n, 0.0);
  std::vector<int> co(n * n, 0);
  for (const auto& [user, items] : by_user) {
    for (const auto& [i, ri] : items) {
      for (const auto& [j, rj] : items) {
        dot[i * n + j] += ri * rj;
        sq_i[i * n + j] += ri * ri;
        co[i * n + j] += 1;
      }
    }
  }
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const std::size_t ij = i * n + j;
      if (co[ij] == 0) {
        dist[ij] = 1.0;
        continue;
      }
      const double denom = std::sqrt(sq_i[ij]) * std::sqrt(sq_i[j * n + i]);
      const double cosine = denom > 0.0 ? dot[ij] / denom : 0.0;
      dist[ij] = 1.0 - std::clamp(cosine, -1.0, 1.0);
    }
  }

  auto merges = agglomerate(std::move(dist), n, cfg.linkage);
  auto labels = cut_dendrogram(merges, n, cfg.n_clusters);

  ClusterAssignment ca;
  ca.n_clusters = cfg.n_clusters;
  for (std::size_t i = 0; i < n; ++i) ca.cluster_of.emplace(ids[i], labels[i]);
  return ca;
}

}  // namespace expleval
