#include "expleval/fuzzy.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "expleval/errors.hpp"

namespace expleval {

FactorSet FactorSet::standard() { return {{kAllMetrics.begin(), kAllMetrics.end()}}; }

void FactorSet::validate() const {
  if (factors.empty()) throw ValidationError("factor set is empty");
  if (std::set<MetricId>(factors.begin(), factors.end()).size() != factors.size()) {
    throw ValidationError("factor set contains duplicates");
  }
}

GradeSet GradeSet::standard() { return {{kAllGrades.begin(), kAllGrades.end()}}; }

void GradeSet::validate() const {
  if (grades.empty()) throw ValidationError("grade set is empty");
  for (std::size_t k = 1; k < grades.size(); ++k) {
    if (ordinal(grades[k]) <= ordinal(grades[k - 1])) throw ValidationError("grades must be strictly ascending");
  }
}

void FuzzyMappingMatrix::validate(double tolerance) const {
  if (rows.empty()) throw ValidationError("mapping matrix has no rows");
  const auto p = rows.front().size();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != p) throw ValidationError("mapping matrix is not rectangular");
    double sum = 0.0;
    for (double v : rows[i]) {
      if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("membership outside [0,1] in row " + std::to_string(i));
      sum += v;
    }
    if (std::fabs(sum - 1.0) > tolerance) throw ValidationError("row " + std::to_string(i) + " does not sum to 1");
  }
}

WeightVector WeightVector::equal(std::size_t n) {
  if (n == 0) throw ValidationError("weight vector needs at least one factor");
  return {std::vector<double>(n, 1.0 / static_cast<double>(n))};
}

void WeightVector::validate(double tolerance) const {
  if (weights.empty()) throw ValidationError("weight vector is empty");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("weights must be finite and non-negative");
    sum += w;
  }
  if (std::fabs(sum - 1.0) > tolerance) throw ValidationError("weights sum to " + std::to_string(sum) + ", not 1");
}

double AppraisalVector::sum() const {
  double s = 0.0;
  for (double v : e) s += v;
  return s;
}

FuzzyMappingMatrix build_mapping_matrix(const FactorSet& factors, const std::vector<std::vector<int>>& responses,
                                        const GradeSet& grades) {
  factors.validate();
  grades.validate();
  if (responses.size() != factors.size()) {
    throw ValidationError("expected responses for " + std::to_string(factors.size()) + " factors, got " +
                          std::to_string(responses.size()));
  }
  FuzzyMappingMatrix r;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const auto& scores = responses[i];
    if (scores.empty()) throw ValidationError("factor " + std::string(to_string(factors.factors[i])) + " has no responses");
    std::vector<double> row(grades.size(), 0.0);
    for (int score : scores) {
      const auto g = grade_of_score(score);
      const auto it = std::find(grades.grades.begin(), grades.grades.end(), g);
      if (it == grades.grades.end()) throw ValidationError("score " + std::to_string(score) + " maps to no grade");
      row[static_cast<std::size_t>(it - grades.grades.begin())] += 1.0;
    }
    for (double& v : row) v /= static_cast<double>(scores.size());
    r.rows.push_back(std::move(row));
  }
  return r;
}

AppraisalVector SumComposition::compose(const WeightVector& w, const FuzzyMappingMatrix& r) const {
  if (w.weights.size() != r.n_factors()) {
    throw ValidationError("weights have " + std::to_string(w.weights.size()) + " entries but R has " +
                          std::to_string(r.n_factors()) + " rows");
  }
  AppraisalVector out{std::vector<double>(r.n_grades(), 0.0)};
  for (std::size_t i = 0; i < r.n_factors(); ++i) {
    if (r.rows[i].size() != out.e.size()) throw ValidationError("mapping matrix is not rectangular");
    for (std::size_t j = 0; j < out.e.size(); ++j) out.e[j] += w.weights[i] * r.rows[i][j];
  }
  return out;
}

AppraisalVector compose(const WeightVector& w, const FuzzyMappingMatrix& r, const CompositionOperator& op) {
  return op.compose(w, r);
}

Classification classify(const AppraisalVector& e, const GradeSet& grades) {
  if (e.e.empty()) throw ValidationError("appraisal vector is empty");
  if (e.e.size() != grades.size()) throw ValidationError("appraisal vector and grade set differ in size");
  std::size_t best = 0;
  for (std::size_t j = 1; j < e.e.size(); ++j) {
    if (e.e[j] >= e.e[best]) best = j;
  }
  Classification c;
  c.grade = grades.grades[best];
  c.membership = e.e[best];
  for (std::size_t j = 0; j < e.e.size(); ++j) {
    if (j != best && e.e[j] == e.e[best]) c.tie = true;
  }
  return c;
}

double implied_mean(const AppraisalVector& e, const GradeSet& grades, double tolerance) {
  if (e.e.size() != grades.size()) throw ValidationError("appraisal vector and grade set differ in size");
  if (std::fabs(e.sum() - 1.0) > tolerance) throw ValidationError("appraisal vector is not normalized");
  double m = 0.0;
  for (std::size_t j = 0; j < e.e.size(); ++j) m += ordinal(grades.grades[j]) * e.e[j];
  return m;
}

StyleEvaluation evaluate_style(std::span<const Session> sessions, ExplanationStyle style, const WeightVector& w,
                               const CompositionOperator& op) {
  const auto factors = FactorSet::standard();
  std::vector<std::vector<int>> responses(factors.size());
  for (const auto& s : sessions) {
    for (const auto& l : s.likert) {
      if (l.style == style) responses[index_of(l.metric)].push_back(l.score);
    }
  }
  w.validate();
  StyleEvaluation out;
  out.style = style;
  out.r = build_mapping_matrix(factors, responses);
  out.e = compose(w, out.r, op);
  out.classification = classify(out.e);
  return out;
}

WeightVector weights_from_document(const KvDocument& doc) {
  const std::string section = doc.has_section("weights") ? "weights" : "";
  WeightVector w{std::vector<double>(kAllMetrics.size(), 0.0)};
  const auto entries = doc.entries(section);
  if (entries.empty()) throw ValidationError("weights document names no metrics");
  for (const auto& [key, value] : entries) {
    const auto metric = parse_metric(key);
    try {
      std::size_t used = 0;
      const double v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      w.weights[index_of(metric)] = v;
    } catch (const std::logic_error&) {
      throw ValidationError("weight for " + key + " is not a number: '" + value + "'");
    }
  }
  w.validate();
  return w;
}

WeightVector load_weights(const std::filesystem::path& path) { return weights_from_document(KvDocument::load(path)); }

}  // namespace expleval
