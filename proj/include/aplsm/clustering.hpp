#pragma once

#include "aplsm/types.hpp"
#include "aplsm/vbem.hpp"

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace aplsm {

struct ClusterAssignment {
  std::vector<int> labels;
  int k = 0;
  double objective = 0.0;           // total within-cluster sum of squares
  double variance_explained = 0.0;  // 1 - WSS/TSS
};

/// Multi-start Hartigan-Wong k-means. Starts use Forgy initialization
/// (k distinct points) and run concurrently; the best objective wins with
/// the lowest start index as tie-break, so results are seed-deterministic.
ClusterAssignment kmeans(const Matrix& points, int k, int n_starts = 100,
                         std::uint64_t seed = 0);

double variance_explained(const ClusterAssignment& assignment,
                          const Matrix& points);

/// Stacked person-then-attribute means for joint clustering.
Matrix stacked_positions(const VariationalState& state);

struct ClusterLinkSummaries {
  /// Fitted friendship probabilities per unordered cluster pair (c1 <= c2);
  /// same-pair buckets are within-cluster. Empty buckets are flagged by a
  /// NaN median.
  std::map<std::pair<int, int>, std::vector<double>> friendship_probs;
  std::map<std::pair<int, int>, double> friendship_medians;
  /// Per (attribute, cluster): fitted presence probabilities over the
  /// cluster's persons. medians is M x k (NaN for empty clusters).
  std::vector<std::vector<std::vector<double>>> attribute_probs;
  Matrix attribute_medians;
};

/// Labels must cover persons first (and attributes after, when the fit has
/// them): labels.size() == N or N + M.
ClusterLinkSummaries cluster_link_summaries(const ClusterAssignment& assignment,
                                            const FitResult& result);

double median(std::vector<double> values);

}  // namespace aplsm
