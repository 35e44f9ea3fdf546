#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace aplsm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Binary data cell: 0, 1, or kMissing for entries excluded from every sum.
using BinaryMatrix = Eigen::Matrix<std::int8_t, Eigen::Dynamic, Eigen::Dynamic>;
constexpr std::int8_t kMissing = -1;

/// N x N adjacency matrix of the person-person network. The diagonal is
/// never read; self-loop entries are accepted and ignored. Undirected
/// networks are stored symmetrically and validated on construction.
class SocialNetwork {
 public:
  SocialNetwork(BinaryMatrix entries, bool directed = false);

  int n_persons() const { return static_cast<int>(entries_.rows()); }
  bool directed() const { return directed_; }

  bool present(int i, int j) const {
    return i != j && entries_(i, j) != kMissing;
  }
  double value(int i, int j) const { return entries_(i, j); }
  const BinaryMatrix& entries() const { return entries_; }

  /// Mean of present off-diagonal entries; NaN when none are present.
  double density() const;
  /// Sum of y over present ordered pairs (i, j), i != j.
  double edge_total() const;
  /// Number of present ordered pairs.
  long present_pairs() const;

 private:
  BinaryMatrix entries_;
  bool directed_ = false;
};

/// N x M person-attribute incidence matrix with optional attribute names.
class AttributeMatrix {
 public:
  explicit AttributeMatrix(BinaryMatrix entries,
                           std::vector<std::string> names = {});

  int n_persons() const { return static_cast<int>(entries_.rows()); }
  int n_attributes() const { return static_cast<int>(entries_.cols()); }

  bool present(int i, int a) const { return entries_(i, a) != kMissing; }
  double value(int i, int a) const { return entries_(i, a); }
  const BinaryMatrix& entries() const { return entries_; }
  const std::vector<std::string>& names() const { return names_; }

  double density() const;
  double positive_total() const;
  long present_cells() const;

 private:
  BinaryMatrix entries_;
  std::vector<std::string> names_;
};

/// Latent-space dimension and the fixed prior variances lambda0^2, lambda1^2.
struct LatentConfig {
  int dim = 2;
  double prior_var_person = 1.0;
  double prior_var_attribute = 1.0;

  void validate() const;
};

/// Point configurations: person rows u_i (N x D) and attribute rows v_a (M x D).
struct LatentPositions {
  Matrix persons;
  Matrix attributes;
};

/// Density intercepts of the two networks.
struct Intercepts {
  double alpha0 = 0.0;
  double alpha1 = 0.0;
};

enum class LinkFamily {
  bernoulli_logistic,
  poisson_log,
  zero_inflated_poisson,
};

enum class ModelKind { lsm, blsm, aplsm };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

}  // namespace aplsm
