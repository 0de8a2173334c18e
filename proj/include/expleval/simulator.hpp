#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <vector>

#include "expleval/events.hpp"
#include "expleval/random.hpp"

namespace expleval {

/// Weights over Likert-range values; sampled proportionally.
struct ScoreDistribution {
  std::map<int, double> weights;

  int sample(Rng& rng) const;
  /// Restricted to [lo, hi]; uniform over that range when no weight falls in it.
  int sample_within(Rng& rng, int lo, int hi) const;
  void validate(int lo, int hi, const std::string& what) const;
};

struct TimeDistribution {
  double mean_ms = 5000.0;
  double sd_ms = 0.0;
};

/// Declarative synthetic cohort. Maps are keyed by style name (and metric
/// name for Likert answers); "*" matches anything not listed.
struct SimulationProfile {
  ScoreDistribution seed_score;
  std::map<std::string, ScoreDistribution> r;
  std::map<std::string, ScoreDistribution> diff;  // r - r', in [-4, 4]
  std::map<std::string, TimeDistribution> time_ms;
  std::map<std::string, std::map<std::string, ScoreDistribution>> likert;

  /// Every style and metric must resolve to a valid distribution.
  void validate() const;
  const ScoreDistribution& r_for(ExplanationStyle s) const;
  const ScoreDistribution& diff_for(ExplanationStyle s) const;
  const TimeDistribution& time_for(ExplanationStyle s) const;
  const ScoreDistribution& likert_for(ExplanationStyle s, MetricId m) const;
};

SimulationProfile profile_from_json(const Json& j);
SimulationProfile load_profile(const std::filesystem::path& path);

struct SimulationOptions {
  std::size_t n_sessions = 0;
  std::uint64_t seed = 0;
  std::int64_t ts_base_ms = 1'700'000'000'000;
};

/// Runs complete sessions through the real protocol with simulated answers.
/// Deterministic for fixed inputs.
std::vector<EventRecord> simulate(const StudyContext& ctx, const SimulationProfile& profile,
                                  const SimulationOptions& opts);

}  // namespace expleval
