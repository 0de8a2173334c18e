#pragma once

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "expleval/domain.hpp"
#include "expleval/kv_document.hpp"
#include "expleval/protocol.hpp"

namespace expleval {

/// Ordered evaluation factors.
struct FactorSet {
  std::vector<MetricId> factors;

  /// The six metrics in canonical order.
  static FactorSet standard();
  std::size_t size() const { return factors.size(); }
  void validate() const;
};

/// Ordered appraisal grades, ascending.
struct GradeSet {
  std::vector<AppraisalGrade> grades;

  static GradeSet standard();
  std::size_t size() const { return grades.size(); }
  void validate() const;
};

/// Row i holds the membership of factor i in each grade.
struct FuzzyMappingMatrix {
  std::vector<std::vector<double>> rows;

  std::size_t n_factors() const { return rows.size(); }
  std::size_t n_grades() const { return rows.empty() ? 0 : rows.front().size(); }
  /// Rectangular, entries in [0,1], rows summing to 1 within tolerance.
  void validate(double tolerance = 1e-9) const;
};

struct WeightVector {
  std::vector<double> weights;

  static WeightVector equal(std::size_t n);
  /// Non-negative and summing to 1 within tolerance.
  void validate(double tolerance = 1e-9) const;
};

struct AppraisalVector {
  std::vector<double> e;

  double sum() const;
};

/// r_ik = share of factor i's responses whose score maps to grade k.
FuzzyMappingMatrix build_mapping_matrix(const FactorSet& factors, const std::vector<std::vector<int>>& responses,
                                        const GradeSet& grades = GradeSet::standard());

class CompositionOperator {
 public:
  virtual ~CompositionOperator() = default;
  virtual std::string name() const = 0;
  virtual AppraisalVector compose(const WeightVector& w, const FuzzyMappingMatrix& r) const = 0;
};

/// e_j = sum_i w_i * r_ij
class SumComposition final : public CompositionOperator {
 public:
  std::string name() const override { return "sum"; }
  AppraisalVector compose(const WeightVector& w, const FuzzyMappingMatrix& r) const override;
};

AppraisalVector compose(const WeightVector& w, const FuzzyMappingMatrix& r,
                        const CompositionOperator& op = SumComposition{});

struct Classification {
  AppraisalGrade grade = AppraisalGrade::Medium;
  double membership = 0.0;
  bool tie = false;
};

/// Grade with the largest membership; ties go to the higher grade.
Classification classify(const AppraisalVector& e, const GradeSet& grades = GradeSet::standard());

/// Membership-weighted mean grade ordinal. E must sum to 1 within tolerance.
double implied_mean(const AppraisalVector& e, const GradeSet& grades = GradeSet::standard(),
                    double tolerance = 0.01);

struct StyleEvaluation {
  ExplanationStyle style = ExplanationStyle::Avg;
  FuzzyMappingMatrix r;
  AppraisalVector e;
  Classification classification;
};

/// Builds R from the Likert answers of the given sessions for one style,
/// composes with W and classifies. W is indexed like FactorSet::standard().
StyleEvaluation evaluate_style(std::span<const Session> sessions, ExplanationStyle style, const WeightVector& w,
                               const CompositionOperator& op = SumComposition{});

/// Weights keyed by metric name, at the root or under [weights]. Metrics not
/// named get weight 0; the result must sum to 1.
WeightVector weights_from_document(const KvDocument& doc);
WeightVector load_weights(const std::filesystem::path& path);

}  // namespace expleval
