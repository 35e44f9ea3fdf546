#include "aplsm/core_model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace aplsm {

namespace {

void check_binary(const BinaryMatrix& entries, const char* what) {
  for (Eigen::Index i = 0; i < entries.rows(); ++i) {
    for (Eigen::Index j = 0; j < entries.cols(); ++j) {
      const auto v = entries(i, j);
      if (v != 0 && v != 1 && v != kMissing) {
        throw std::invalid_argument(std::string(what) +
                                    ": entries must be 0, 1 or missing");
      }
    }
  }
}

}  // namespace

SocialNetwork::SocialNetwork(BinaryMatrix entries, bool directed)
    : entries_(std::move(entries)), directed_(directed) {
  if (entries_.rows() != entries_.cols()) {
    throw std::invalid_argument("SocialNetwork: adjacency matrix must be square");
  }
  check_binary(entries_, "SocialNetwork");
  if (!directed_) {
    for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
      for (Eigen::Index j = i + 1; j < entries_.cols(); ++j) {
        if (entries_(i, j) != entries_(j, i)) {
          throw std::invalid_argument(
              "SocialNetwork: undirected network must be symmetric");
        }
      }
    }
  }
}

double SocialNetwork::density() const {
  const long pairs = present_pairs();
  if (pairs == 0) return std::numeric_limits<double>::quiet_NaN();
  return edge_total() / static_cast<double>(pairs);
}

double SocialNetwork::edge_total() const {
  double total = 0.0;
  for (int i = 0; i < n_persons(); ++i)
    for (int j = 0; j < n_persons(); ++j)
      if (present(i, j)) total += value(i, j);
  return total;
}

long SocialNetwork::present_pairs() const {
  long count = 0;
  for (int i = 0; i < n_persons(); ++i)
    for (int j = 0; j < n_persons(); ++j)
      if (present(i, j)) ++count;
  return count;
}

AttributeMatrix::AttributeMatrix(BinaryMatrix entries,
                                 std::vector<std::string> names)
    : entries_(std::move(entries)), names_(std::move(names)) {
  check_binary(entries_, "AttributeMatrix");
  if (!names_.empty() &&
      names_.size() != static_cast<std::size_t>(entries_.cols())) {
    throw std::invalid_argument(
        "AttributeMatrix: name count must match column count");
  }
}

double AttributeMatrix::density() const {
  const long cells = present_cells();
  if (cells == 0) return std::numeric_limits<double>::quiet_NaN();
  return positive_total() / static_cast<double>(cells);
}

double AttributeMatrix::positive_total() const {
  double total = 0.0;
  for (int i = 0; i < n_persons(); ++i)
    for (int a = 0; a < n_attributes(); ++a)
      if (present(i, a)) total += value(i, a);
  return total;
}

long AttributeMatrix::present_cells() const {
  long count = 0;
  for (int i = 0; i < n_persons(); ++i)
    for (int a = 0; a < n_attributes(); ++a)
      if (present(i, a)) ++count;
  return count;
}

void LatentConfig::validate() const {
  if (dim < 1) throw std::invalid_argument("LatentConfig: dim must be >= 1");
  if (!(prior_var_person > 0.0) || !(prior_var_attribute > 0.0)) {
    throw std::invalid_argument(
        "LatentConfig: prior variances must be strictly positive");
  }
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::lsm: return "lsm";
    case ModelKind::blsm: return "blsm";
    case ModelKind::aplsm: return "aplsm";
  }
  return "aplsm";
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "lsm") return ModelKind::lsm;
  if (s == "blsm") return ModelKind::blsm;
  if (s == "aplsm") return ModelKind::aplsm;
  throw std::invalid_argument("unknown model kind: " + s);
}

double squared_distance(const Eigen::Ref<const Vector>& x,
                        const Eigen::Ref<const Vector>& y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("squared_distance: dimension mismatch");
  }
  return (x - y).squaredNorm();
}

double logistic(double theta) {
  if (theta >= 0.0) {
    return 1.0 / (1.0 + std::exp(-theta));
  }
  const double e = std::exp(theta);
  return e / (1.0 + e);
}

double log1p_exp(double t) {
  if (t > 0.0) return t + std::log1p(std::exp(-t));
  return std::log1p(std::exp(t));
}

double log_logistic(double theta) { return -log1p_exp(-theta); }

double logit(double p) { return std::log(p) - std::log1p(-p); }

LinkValue link_probability(double theta, LinkFamily family) {
  switch (family) {
    case LinkFamily::bernoulli_logistic:
      return {logistic(theta), 0.0};
    case LinkFamily::poisson_log:
      return {std::exp(theta), 0.0};
    case LinkFamily::zero_inflated_poisson:
      return {logistic(theta), std::exp(theta)};
  }
  throw std::invalid_argument("link_probability: unknown family");
}

double social_log_likelihood(const SocialNetwork& yi, const Matrix& persons,
                             double alpha0) {
  const int n = yi.n_persons();
  if (persons.rows() != n) {
    throw std::invalid_argument("social_log_likelihood: row count mismatch");
  }
  double ll = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (!yi.present(i, j)) continue;
      const double theta =
          alpha0 - (persons.row(i) - persons.row(j)).squaredNorm();
      ll += yi.value(i, j) > 0.5 ? log_logistic(theta) : log_logistic(-theta);
    }
  }
  return ll;
}

double attribute_log_likelihood(const AttributeMatrix& yia, const Matrix& persons,
                                const Matrix& attributes, double alpha1) {
  if (persons.rows() != yia.n_persons() ||
      attributes.rows() != yia.n_attributes()) {
    throw std::invalid_argument("attribute_log_likelihood: shape mismatch");
  }
  if (persons.cols() != attributes.cols()) {
    throw std::invalid_argument("attribute_log_likelihood: dimension mismatch");
  }
  double ll = 0.0;
  for (int i = 0; i < yia.n_persons(); ++i) {
    for (int a = 0; a < yia.n_attributes(); ++a) {
      if (!yia.present(i, a)) continue;
      const double theta =
          alpha1 - (persons.row(i) - attributes.row(a)).squaredNorm();
      ll += yia.value(i, a) > 0.5 ? log_logistic(theta) : log_logistic(-theta);
    }
  }
  return ll;
}

double joint_log_likelihood(const SocialNetwork& yi, const AttributeMatrix& yia,
                            const LatentPositions& pos, const Intercepts& icpt) {
  if (yi.n_persons() != yia.n_persons()) {
    throw std::invalid_argument("joint_log_likelihood: person count mismatch");
  }
  return social_log_likelihood(yi, pos.persons, icpt.alpha0) +
         attribute_log_likelihood(yia, pos.persons, pos.attributes, icpt.alpha1);
}

}  // namespace aplsm
