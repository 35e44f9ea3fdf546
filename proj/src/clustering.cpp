#include "aplsm/clustering.hpp"

#include "aplsm/core_model.hpp"
#include "aplsm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace aplsm {

namespace {

constexpr double kTransferGain = 1e-12;

struct RunState {
  std::vector<int> labels;
  Matrix centers;
  std::vector<int> sizes;
};

void recompute_centers(const Matrix& points, RunState* run) {
  const int k = static_cast<int>(run->centers.rows());
  run->centers.setZero();
  std::fill(run->sizes.begin(), run->sizes.end(), 0);
  for (Eigen::Index p = 0; p < points.rows(); ++p) {
    run->centers.row(run->labels[p]) += points.row(p);
    ++run->sizes[run->labels[p]];
  }
  for (int c = 0; c < k; ++c) {
    if (run->sizes[c] > 0) run->centers.row(c) /= run->sizes[c];
  }
}

int nearest_center(const Matrix& centers, const Eigen::RowVectorXd& x) {
  int best = 0;
  double best_d = (x - centers.row(0)).squaredNorm();
  for (Eigen::Index c = 1; c < centers.rows(); ++c) {
    const double d = (x - centers.row(c)).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

/// Move the farthest point of the largest cluster into each empty cluster.
void repair_empty(const Matrix& points, RunState* run) {
  const int k = static_cast<int>(run->centers.rows());
  for (int c = 0; c < k; ++c) {
    if (run->sizes[c] > 0) continue;
    int largest = static_cast<int>(std::distance(
        run->sizes.begin(), std::max_element(run->sizes.begin(), run->sizes.end())));
    int farthest = -1;
    double far_d = -1.0;
    for (Eigen::Index p = 0; p < points.rows(); ++p) {
      if (run->labels[p] != largest) continue;
      const double d = (points.row(p) - run->centers.row(largest)).squaredNorm();
      if (d > far_d) {
        far_d = d;
        farthest = static_cast<int>(p);
      }
    }
    run->labels[farthest] = c;
    recompute_centers(points, run);
  }
}

double total_wss(const Matrix& points, const std::vector<int>& labels,
                 const Matrix& centers) {
  double wss = 0.0;
  for (Eigen::Index p = 0; p < points.rows(); ++p) {
    wss += (points.row(p) - centers.row(labels[p])).squaredNorm();
  }
  return wss;
}

/// One Hartigan-Wong run from a Forgy start. Optimal single-point transfers
/// until a full pass makes no move; moves that would empty a cluster are
/// skipped.
RunState hartigan_wong_run(const Matrix& points, int k, Rng rng) {
  const int n = static_cast<int>(points.rows());
  RunState run;
  run.centers = Matrix(k, points.cols());
  run.sizes.assign(k, 0);

  // Forgy: k distinct point indices.
  std::vector<int> indices(n);
  std::iota(indices.begin(), indices.end(), 0);
  for (int c = 0; c < k; ++c) {
    const int pick = c + rng.uniform_int(n - c);
    std::swap(indices[c], indices[pick]);
    run.centers.row(c) = points.row(indices[c]);
  }

  run.labels.resize(n);
  for (int p = 0; p < n; ++p) {
    run.labels[p] = nearest_center(run.centers, points.row(p));
  }
  recompute_centers(points, &run);
  repair_empty(points, &run);

  const int max_passes = 100 + 10 * n;
  for (int pass = 0; pass < max_passes; ++pass) {
    bool moved = false;
    for (int p = 0; p < n; ++p) {
      const int c1 = run.labels[p];
      const int n1 = run.sizes[c1];
      if (n1 <= 1) continue;
      const Eigen::RowVectorXd x = points.row(p);
      const double removal =
          (static_cast<double>(n1) / (n1 - 1)) *
          (x - run.centers.row(c1)).squaredNorm();
      int best = -1;
      double best_cost = removal - kTransferGain;
      for (int c2 = 0; c2 < k; ++c2) {
        if (c2 == c1) continue;
        const int n2 = run.sizes[c2];
        const double cost = (static_cast<double>(n2) / (n2 + 1)) *
                            (x - run.centers.row(c2)).squaredNorm();
        if (cost < best_cost) {
          best_cost = cost;
          best = c2;
        }
      }
      if (best >= 0) {
        const int n2 = run.sizes[best];
        run.centers.row(c1) =
            (run.centers.row(c1) * n1 - x) / static_cast<double>(n1 - 1);
        run.centers.row(best) =
            (run.centers.row(best) * n2 + x) / static_cast<double>(n2 + 1);
        run.sizes[c1] = n1 - 1;
        run.sizes[best] = n2 + 1;
        run.labels[p] = best;
        moved = true;
      }
    }
    recompute_centers(points, &run);  // undo incremental drift
    if (!moved) break;
  }
  return run;
}

}  // namespace

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

ClusterAssignment kmeans(const Matrix& points, int k, int n_starts,
                         std::uint64_t seed) {
  const int n = static_cast<int>(points.rows());
  if (k < 1 || k > n) {
    throw std::invalid_argument("kmeans: k must be in [1, #points]");
  }
  if (!points.allFinite()) {
    throw std::invalid_argument("kmeans: points must be finite");
  }
  if (n_starts < 1) {
    throw std::invalid_argument("kmeans: n_starts must be >= 1");
  }

  std::vector<double> objectives(n_starts);
  std::vector<std::vector<int>> labels(n_starts);

#pragma omp parallel for schedule(dynamic)
  for (int s = 0; s < n_starts; ++s) {
    RunState run = hartigan_wong_run(points, k, Rng::for_stream(seed, s));
    objectives[s] = total_wss(points, run.labels, run.centers);
    labels[s] = std::move(run.labels);
  }

  int best = 0;
  for (int s = 1; s < n_starts; ++s) {
    if (objectives[s] < objectives[best]) best = s;
  }

  ClusterAssignment out;
  out.labels = labels[best];
  out.k = k;
  out.objective = objectives[best];
  out.variance_explained = variance_explained(out, points);
  return out;
}

double variance_explained(const ClusterAssignment& assignment,
                          const Matrix& points) {
  if (static_cast<Eigen::Index>(assignment.labels.size()) != points.rows()) {
    throw std::invalid_argument("variance_explained: label count mismatch");
  }
  const Eigen::RowVectorXd grand = points.colwise().mean();
  double tss = 0.0;
  for (Eigen::Index p = 0; p < points.rows(); ++p) {
    tss += (points.row(p) - grand).squaredNorm();
  }
  if (tss <= 0.0) return 0.0;

  Matrix centers = Matrix::Zero(assignment.k, points.cols());
  std::vector<int> sizes(assignment.k, 0);
  for (Eigen::Index p = 0; p < points.rows(); ++p) {
    centers.row(assignment.labels[p]) += points.row(p);
    ++sizes[assignment.labels[p]];
  }
  for (int c = 0; c < assignment.k; ++c) {
    if (sizes[c] > 0) centers.row(c) /= sizes[c];
  }
  const double wss = total_wss(points, assignment.labels, centers);
  return 1.0 - wss / tss;
}

Matrix stacked_positions(const VariationalState& state) {
  Matrix stacked(state.n_persons() + state.n_attributes(), state.dim());
  stacked.topRows(state.n_persons()) = state.mean_persons;
  if (state.n_attributes() > 0) {
    stacked.bottomRows(state.n_attributes()) = state.mean_attributes;
  }
  return stacked;
}

ClusterLinkSummaries cluster_link_summaries(const ClusterAssignment& assignment,
                                            const FitResult& result) {
  const int n = result.state.n_persons();
  const int m = result.state.n_attributes();
  const auto labels_size = static_cast<int>(assignment.labels.size());
  if (labels_size != n && labels_size != n + m) {
    throw std::invalid_argument(
        "cluster_link_summaries: labels must cover persons (and attributes)");
  }

  const LinkProbabilities probs = posterior_link_probabilities(result);
  ClusterLinkSummaries out;

  if (probs.social.rows() == n) {
    for (int c1 = 0; c1 < assignment.k; ++c1)
      for (int c2 = c1; c2 < assignment.k; ++c2)
        out.friendship_probs[{c1, c2}] = {};
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        int c1 = assignment.labels[i];
        int c2 = assignment.labels[j];
        if (c1 > c2) std::swap(c1, c2);
        out.friendship_probs[{c1, c2}].push_back(probs.social(i, j));
      }
    }
    for (const auto& [key, values] : out.friendship_probs) {
      out.friendship_medians[key] = median(values);
    }
  }

  if (m > 0 && probs.attribute.rows() == n) {
    out.attribute_probs.assign(
        m, std::vector<std::vector<double>>(assignment.k));
    out.attribute_medians = Matrix::Constant(
        m, assignment.k, std::numeric_limits<double>::quiet_NaN());
    for (int a = 0; a < m; ++a) {
      for (int i = 0; i < n; ++i) {
        out.attribute_probs[a][assignment.labels[i]].push_back(
            probs.attribute(i, a));
      }
      for (int c = 0; c < assignment.k; ++c) {
        out.attribute_medians(a, c) = median(out.attribute_probs[a][c]);
      }
    }
  }
  return out;
}

}  // namespace aplsm
