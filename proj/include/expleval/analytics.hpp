#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "expleval/domain.hpp"
#include "expleval/protocol.hpp"
#include "expleval/stats.hpp"

namespace expleval {

struct ObjectiveRow {
  double mean_time_s = 0.0;
  double mean_diff = 0.0;      // mean of r - r'
  double mean_abs_diff = 0.0;  // supplementary effectiveness figure
  std::size_t n_trials = 0;
};

/// "positive" when r - r' > 0 on average, "negative" when < 0, else "neutral".
std::string_view persuasiveness_label(double mean_diff);

/// Indexed by index_of(style); absent when a style has no complete trial.
struct ObjectiveReport {
  std::array<std::optional<ObjectiveRow>, kAllStyles.size()> rows;
};

ObjectiveReport objective_report(std::span<const Session> sessions);

struct SubjectiveCell {
  double mean = 0.0;
  std::size_t n = 0;
};

/// cells[style][metric]; absent when nobody answered the cell.
struct SubjectiveReport {
  std::array<std::array<std::optional<SubjectiveCell>, kAllMetrics.size()>, kAllStyles.size()> cells;
};

SubjectiveReport subjective_report(std::span<const Session> sessions);

/// Spearman correlations between per-session values of several variables for
/// one style. The first six variables are the Likert metrics; with objective
/// columns, decision time (s) and r - r' follow.
struct CorrelationMatrix {
  ExplanationStyle style = ExplanationStyle::ContextAware;
  std::vector<std::string> variables;
  std::size_t n = 0;
  /// Absent when fewer than 3 sessions or a variable is constant.
  std::vector<std::vector<std::optional<SpearmanResult>>> cells;
};

CorrelationMatrix correlation_matrix(std::span<const Session> sessions, ExplanationStyle style,
                                     bool include_objective = false);

enum class Granularity { PerTrial, PerParticipant };
std::string_view to_string(Granularity g);

/// ANOVA across styles plus Tukey HSD pairs (indices are style indices) for
/// one measure.
struct SignificanceTest {
  std::string measure;
  Granularity granularity = Granularity::PerTrial;
  std::vector<ExplanationStyle> styles;  // groups that entered the test
  std::optional<AnovaResult> anova;      // absent when fewer than two usable groups
  std::vector<TukeyPair> tukey;
};

/// Measures: decision time, r - r', and each Likert metric. Per-trial uses
/// every observation; per-participant averages each session's observations
/// per style first.
std::vector<SignificanceTest> significance_tests(std::span<const Session> sessions, double alpha = 0.05);

}  // namespace expleval
