#include "aplsm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace aplsm {

double average_absolute_error(const Matrix& est, const Matrix& truth,
                              bool exclude_diagonal) {
  if (est.rows() != truth.rows() || est.cols() != truth.cols()) {
    throw std::invalid_argument("average_absolute_error: shape mismatch");
  }
  double total = 0.0;
  long count = 0;
  for (Eigen::Index i = 0; i < est.rows(); ++i) {
    for (Eigen::Index j = 0; j < est.cols(); ++j) {
      if (exclude_diagonal && i == j) continue;
      if (std::isnan(est(i, j)) || std::isnan(truth(i, j))) continue;
      total += std::abs(est(i, j) - truth(i, j));
      ++count;
    }
  }
  if (count == 0) return std::numeric_limits<double>::quiet_NaN();
  return total / static_cast<double>(count);
}

RocCurve roc_auc(const std::vector<double>& scores,
                 const std::vector<int>& labels) {
  if (scores.size() != labels.size()) {
    throw std::invalid_argument("roc_auc: size mismatch");
  }
  long n_pos = 0, n_neg = 0;
  for (int label : labels) (label ? n_pos : n_neg) += 1;
  if (n_pos == 0 || n_neg == 0) {
    throw std::invalid_argument("roc_auc: both classes must be present");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });

  RocCurve curve;
  double tp = 0.0, fp = 0.0;
  double prev_tpr = 0.0, prev_fpr = 0.0;
  double area = 0.0;
  std::size_t idx = 0;
  while (idx < order.size()) {
    const double threshold = scores[order[idx]];
    // Consume the whole tie block at this threshold.
    while (idx < order.size() && scores[order[idx]] == threshold) {
      (labels[order[idx]] ? tp : fp) += 1.0;
      ++idx;
    }
    const double tpr = tp / static_cast<double>(n_pos);
    const double fpr = fp / static_cast<double>(n_neg);
    area += 0.5 * (tpr + prev_tpr) * (fpr - prev_fpr);
    curve.thresholds.push_back(threshold);
    curve.tpr.push_back(tpr);
    curve.fpr.push_back(fpr);
    prev_tpr = tpr;
    prev_fpr = fpr;
  }
  curve.auc = area;
  return curve;
}

std::vector<double> pairwise_distance_ratios(const Matrix& est,
                                             const Matrix& truth,
                                             int* skipped) {
  if (est.rows() != truth.rows()) {
    throw std::invalid_argument("pairwise_distance_ratios: row count mismatch");
  }
  std::vector<double> ratios;
  int skip_count = 0;
  for (Eigen::Index i = 0; i < est.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < est.rows(); ++j) {
      const double dt = (truth.row(i) - truth.row(j)).norm();
      if (dt <= 0.0) {
        ++skip_count;
        continue;
      }
      ratios.push_back((est.row(i) - est.row(j)).norm() / dt);
    }
  }
  if (skipped) *skipped = skip_count;
  return ratios;
}

std::vector<double> midranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(n, 0.0);
  std::size_t idx = 0;
  while (idx < n) {
    std::size_t end = idx;
    while (end + 1 < n && values[order[end + 1]] == values[order[idx]]) ++end;
    const double rank = 0.5 * (static_cast<double>(idx + 1) +
                               static_cast<double>(end + 1));
    for (std::size_t k = idx; k <= end; ++k) ranks[order[k]] = rank;
    idx = end + 1;
  }
  return ranks;
}

double pearson_correlation(const std::vector<double>& x,
                           const std::vector<double>& y) {
  if (x.size() != y.size() || x.empty()) {
    throw std::invalid_argument("pearson_correlation: size mismatch");
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return sxy / std::sqrt(sxx * syy);
}

double spearman_rank_correlation(const std::vector<double>& x,
                                 const std::vector<double>& y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("spearman_rank_correlation: size mismatch");
  }
  if (x.size() < 3) {
    throw std::invalid_argument("spearman_rank_correlation: need length >= 3");
  }
  return pearson_correlation(midranks(x), midranks(y));
}

namespace {

RankPairs make_rank_pairs(const std::vector<double>& x,
                          const std::vector<double>& y, double intercept) {
  RankPairs pairs;
  pairs.rank_x = midranks(x);
  pairs.rank_y = midranks(y);
  pairs.spearman = x.size() >= 3
                       ? pearson_correlation(pairs.rank_x, pairs.rank_y)
                       : std::numeric_limits<double>::quiet_NaN();
  pairs.reference_intercept = intercept;
  pairs.reference_slope = -1.0;
  return pairs;
}

}  // namespace

RankDiagnostics rank_diagnostics(const FitResult& result,
                                 const SocialNetwork* yi,
                                 const AttributeMatrix* yia) {
  const VariationalState& state = result.state;
  const int n = state.n_persons();
  const int m = state.n_attributes();

  Eigen::RowVectorXd center = state.mean_persons.colwise().sum();
  if (m > 0) center += state.mean_attributes.colwise().sum();
  center /= static_cast<double>(n + m);

  RankDiagnostics out;
  if (yi) {
    std::vector<double> dist(n), degree(n, 0.0);
    for (int i = 0; i < n; ++i) {
      dist[i] = (state.mean_persons.row(i) - center).norm();
      for (int j = 0; j < n; ++j) {
        if (yi->present(i, j)) degree[i] += yi->value(i, j);
        if (yi->directed() && yi->present(j, i)) degree[i] += yi->value(j, i);
      }
    }
    out.person_centrality = make_rank_pairs(dist, degree, n);
  }
  if (yia && m > 0) {
    std::vector<double> dist(m), score(m, 0.0);
    for (int a = 0; a < m; ++a) {
      dist[a] = (state.mean_attributes.row(a) - center).norm();
      for (int i = 0; i < n; ++i)
        if (yia->present(i, a)) score[a] += yia->value(i, a);
    }
    out.attribute_prevalence = make_rank_pairs(dist, score, m);

    std::vector<double> pair_dist, pair_corr;
    for (int a = 0; a < m; ++a) {
      for (int b = a + 1; b < m; ++b) {
        std::vector<double> col_a, col_b;
        for (int i = 0; i < n; ++i) {
          if (yia->present(i, a) && yia->present(i, b)) {
            col_a.push_back(yia->value(i, a));
            col_b.push_back(yia->value(i, b));
          }
        }
        if (col_a.size() < 3) continue;
        const double corr = pearson_correlation(col_a, col_b);
        if (std::isnan(corr)) continue;
        pair_dist.push_back(
            (state.mean_attributes.row(a) - state.mean_attributes.row(b))
                .norm());
        pair_corr.push_back(corr);
      }
    }
    out.attribute_association = make_rank_pairs(
        pair_dist, pair_corr, static_cast<double>(pair_dist.size()));
  }
  return out;
}

Alignment orthogonal_align(const Matrix& source, const Matrix& target) {
  if (source.rows() != target.rows() || source.cols() != target.cols()) {
    throw std::invalid_argument("orthogonal_align: shape mismatch");
  }
  const Matrix src = source.rowwise() - source.colwise().mean();
  const Matrix tgt = target.rowwise() - target.colwise().mean();
  Eigen::JacobiSVD<Matrix> svd(src.transpose() * tgt,
                               Eigen::ComputeFullU | Eigen::ComputeFullV);
  Alignment out;
  out.rotation = svd.matrixU() * svd.matrixV().transpose();
  out.aligned = src * out.rotation;
  out.residual = (out.aligned - tgt).norm();
  return out;
}

double congruence_coefficient(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("congruence_coefficient: shape mismatch");
  }
  const double cross = a.cwiseProduct(b).sum();
  const double denom = std::sqrt(a.squaredNorm() * b.squaredNorm());
  if (denom <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return cross / denom;
}

}  // namespace aplsm
