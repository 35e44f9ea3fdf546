#pragma once

#include "aplsm/types.hpp"
#include "aplsm/vbem.hpp"

#include <vector>

namespace aplsm {

/// Mean |est - true| over comparable entries. NaN cells (and the diagonal of
/// square matrices when exclude_diagonal) are skipped.
double average_absolute_error(const Matrix& est, const Matrix& truth,
                              bool exclude_diagonal = false);

struct RocCurve {
  std::vector<double> thresholds;
  std::vector<double> tpr;
  std::vector<double> fpr;
  double auc = 0.0;
};

/// ROC from sorted unique thresholds; the trapezoidal area equals the
/// tie-corrected Mann-Whitney statistic. Throws when only one class occurs.
RocCurve roc_auc(const std::vector<double>& scores,
                 const std::vector<int>& labels);

/// Per unordered pair, estimated / true Euclidean (not squared) distance.
/// Pairs with coincident true points are skipped and counted in *skipped.
std::vector<double> pairwise_distance_ratios(const Matrix& est,
                                             const Matrix& truth,
                                             int* skipped = nullptr);

/// Pearson correlation of midranked values.
double spearman_rank_correlation(const std::vector<double>& x,
                                 const std::vector<double>& y);

/// Average ranks 1..n with midranks for ties.
std::vector<double> midranks(const std::vector<double>& values);

double pearson_correlation(const std::vector<double>& x,
                           const std::vector<double>& y);

struct RankPairs {
  std::vector<double> rank_x;
  std::vector<double> rank_y;
  double spearman = 0.0;
  // Reference line for the companion scatter plot.
  double reference_intercept = 0.0;
  double reference_slope = -1.0;
};

struct RankDiagnostics {
  /// Person distance-to-center ranks vs total-connection ranks.
  RankPairs person_centrality;
  /// Attribute distance-to-center ranks vs sum-score ranks.
  RankPairs attribute_prevalence;
  /// Attribute pairwise-distance ranks vs column-correlation ranks.
  RankPairs attribute_association;
};

/// The center is the centroid of all fitted positions (persons plus
/// attributes when the model has them). Sides without data are left empty.
RankDiagnostics rank_diagnostics(const FitResult& result,
                                 const SocialNetwork* yi,
                                 const AttributeMatrix* yia);

struct Alignment {
  Matrix rotation;  // D x D orthogonal (rotation or reflection)
  Matrix aligned;   // centered source mapped onto the centered target
  double residual;  // Frobenius distance after alignment
};

/// Orthogonal Procrustes without scaling; both point sets are centered
/// internally (the model is translation invariant).
Alignment orthogonal_align(const Matrix& source, const Matrix& target);

/// Tucker congruence on the vectorized coordinate matrices.
double congruence_coefficient(const Matrix& a, const Matrix& b);

}  // namespace aplsm
