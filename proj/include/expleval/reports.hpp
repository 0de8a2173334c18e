#pragma once

#include <span>
#include <string>

#include "expleval/analytics.hpp"
#include "expleval/fuzzy.hpp"
#include "expleval/json_io.hpp"

namespace expleval {

enum class ReportFormat { Text, Json };
ReportFormat parse_report_format(std::string_view s);

enum class ReportKind { Objective, Subjective, Correlation, Fuzzy, Significance };
std::string_view to_string(ReportKind k);
ReportKind parse_report_kind(std::string_view s);
/// "3".."6" for the study-shaped tables.
ReportKind report_kind_of_table(std::string_view table);

struct ReportOptions {
  ReportFormat format = ReportFormat::Text;
  ExplanationStyle correlation_style = ExplanationStyle::ContextAware;
  bool correlation_objective = false;
  WeightVector weights = WeightVector::equal(kAllMetrics.size());
  double alpha = 0.05;
};

Json objective_json(const ObjectiveReport& r);
Json subjective_json(const SubjectiveReport& r);
Json correlation_json(const CorrelationMatrix& m);
Json fuzzy_json(const std::vector<StyleEvaluation>& rows, const WeightVector& w);
Json significance_json(const std::vector<SignificanceTest>& tests);

std::string objective_text(const ObjectiveReport& r);
std::string subjective_text(const SubjectiveReport& r);
std::string correlation_text(const CorrelationMatrix& m);
std::string fuzzy_text(const std::vector<StyleEvaluation>& rows, const WeightVector& w);
std::string significance_text(const std::vector<SignificanceTest>& tests);

/// Fuzzy evaluation of every style that has Likert answers, in canonical order.
std::vector<StyleEvaluation> evaluate_all_styles(std::span<const Session> sessions, const WeightVector& w);

/// Computes and renders one report over complete sessions. Shared by the CLI
/// and the HTTP service so both emit identical bytes.
std::string render_report(ReportKind kind, std::span<const Session> sessions, const ReportOptions& opts);

}  // namespace expleval
