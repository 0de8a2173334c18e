#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "expleval/dataset.hpp"
#include "expleval/domain.hpp"
#include "expleval/kv_document.hpp"

namespace expleval {

enum class Linkage { Average, Complete, Single };

std::string_view to_string(Linkage l);
Linkage parse_linkage(std::string_view s);

struct RecommenderConfig {
  std::size_t n_clusters = 10;
  Linkage linkage = Linkage::Average;
  double similarity_threshold = 0.5;  // theta, in [-1, 1]
  std::size_t neighborhood_k = 20;
  std::size_t top_n = 6;
  std::size_t min_local_ratings = 50;

  void validate() const;
  /// Reads the `[recommender]` section; unknown keys are rejected.
  static RecommenderConfig from_document(const KvDocument& doc);
};

// ---------------------------------------------------------------------------
// Step 1: item clustering
// ---------------------------------------------------------------------------

struct ClusterAssignment {
  std::map<MovieId, std::size_t> cluster_of;
  std::size_t n_clusters = 0;

  friend bool operator==(const ClusterAssignment&, const ClusterAssignment&) = default;
};

/// Agglomerative clustering of rated movies over their per-user rating
/// vectors (distance = 1 - cosine over co-raters, 1 when there are none),
/// cut to exactly `cfg.n_clusters` clusters. Cluster labels are assigned in
/// order of each cluster's smallest movie id.
ClusterAssignment cluster_items(const Dataset& ds, const RecommenderConfig& cfg);

/// Merge step of the dendrogram; `a` and `b` are leaf indices representing
/// the two clusters being joined.
struct Merge {
  std::size_t a = 0;
  std::size_t b = 0;
  double distance = 0.0;
};

/// Full dendrogram over a dense distance matrix (row-major n x n), ordered by
/// merge distance. Exposed for testing.
std::vector<Merge> agglomerate(std::vector<double> distances, std::size_t n, Linkage linkage);

/// Leaf partition after applying the first n - k merges. Labels dense, ordered
/// by smallest leaf index.
std::vector<std::size_t> cut_dendrogram(const std::vector<Merge>& merges, std::size_t n, std::size_t k);

// ---------------------------------------------------------------------------
// Steps 2-4: condition profiles and situation similarity
// ---------------------------------------------------------------------------

/// Product-moment correlation. nullopt when either side has zero variance.
/// Throws ValidationError on length mismatch or fewer than two points.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

struct ConditionKey {
  StudyFactor factor;
  ConditionId condition;

  friend auto operator<=>(const ConditionKey&, const ConditionKey&) = default;
};

struct ConditionProfile {
  std::vector<std::optional<double>> pcc_by_cluster;

  friend bool operator==(const ConditionProfile&, const ConditionProfile&) = default;
};

using ConditionProfiles = std::map<ConditionKey, ConditionProfile>;

/// One profile per vocabulary condition of every study factor. Entry g is the
/// PCC between [rating's situation assigns the condition] and the score, over
/// ratings of movies in cluster g.
ConditionProfiles condition_profiles(const Dataset& ds, const ClusterAssignment& ca);

/// Mean of the assigned conditions' profile vectors (absent entries as 0).
/// nullopt when the situation assigns no profiled condition.
std::optional<std::vector<double>> situation_representation(const ContextualSituation& s,
                                                             const ConditionProfiles& profiles);

/// Cosine similarity of the two representations; 0 if either is the zero
/// vector. Throws ValidationError when either situation has no profiled condition.
double situation_similarity(const ContextualSituation& a, const ContextualSituation& b,
                            const ConditionProfiles& profiles);

// ---------------------------------------------------------------------------
// Step 5: local dataset
// ---------------------------------------------------------------------------

struct ThresholdSelection {
  std::vector<std::size_t> indices;  // ascending
  double requested_theta = 0.0;
  double effective_theta = 0.0;
  bool relaxed = false;
  bool used_full = false;  // relaxation hit -1 and everything was taken
};

/// Picks the entries with similarity >= theta. While fewer than `floor` are
/// picked, theta is lowered in 0.1 steps; reaching -1 selects every entry.
/// Entries with no similarity are only taken by the full fallback.
ThresholdSelection select_by_similarity(std::span<const std::optional<double>> similarities, double theta,
                                        std::size_t floor);

struct LocalDataset {
  std::vector<ContextualRating> ratings;
  ThresholdSelection selection;
};

LocalDataset select_local_dataset(const Dataset& ds, const ContextualSituation& target,
                                  const ConditionProfiles& profiles, const RecommenderConfig& cfg);

// ---------------------------------------------------------------------------
// Step 6: 2D recommender on the local dataset
// ---------------------------------------------------------------------------

struct Recommendation {
  MovieId movie_id;
  double predicted = 0.0;

  friend bool operator==(const Recommendation&, const Recommendation&) = default;
};

struct RecommendationResult {
  std::vector<Recommendation> items;
  bool cold_start = false;
};

/// Item-based KNN collaborative filtering. Candidates are local items neither
/// excluded nor rated by the user. Throws InsufficientDataError when no
/// candidate remains, ValidationError when `local` is empty.
RecommendationResult recommend(std::span<const ContextualRating> local, const UserId& user,
                               const std::set<MovieId>& exclude, const RecommenderConfig& cfg);

/// Clusters and profiles built once from a base dataset.
class RecommenderModel {
 public:
  RecommenderModel(const Dataset& ds, RecommenderConfig cfg);

  const RecommenderConfig& config() const { return config_; }
  const ClusterAssignment& clusters() const { return clusters_; }
  const ConditionProfiles& profiles() const { return profiles_; }

 private:
  RecommenderConfig config_;
  ClusterAssignment clusters_;
  ConditionProfiles profiles_;
};

}  // namespace expleval
