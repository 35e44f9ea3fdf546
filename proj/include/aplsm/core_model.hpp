#pragma once

#include "aplsm/types.hpp"

namespace aplsm {

/// Squared Euclidean distance sum_d (x_d - y_d)^2. Throws on dimension
/// mismatch.
double squared_distance(const Eigen::Ref<const Vector>& x,
                        const Eigen::Ref<const Vector>& y);

/// exp(t) / (1 + exp(t)) evaluated without overflow for any finite t.
double logistic(double theta);

/// log(1 + exp(t)), overflow-safe.
double log1p_exp(double t);

/// log logistic(t), overflow-safe.
double log_logistic(double theta);

double logit(double p);

/// Link evaluation at linear predictor theta. For bernoulli_logistic,
/// primary is the success probability; for poisson_log, the rate; for the
/// zero-inflated Poisson, primary is the mixing kappa(theta) and rate
/// carries gamma(theta) (both driven by the same predictor).
struct LinkValue {
  double primary;
  double rate;
};

LinkValue link_probability(double theta, LinkFamily family);

/// Exact Bernoulli-logistic joint log-likelihood of both matrices at fixed
/// positions and intercepts: ordered dyads i != j plus all person-attribute
/// cells, missing entries dropped. theta_ij = alpha0 - |u_i - u_j|^2 and
/// theta_ia = alpha1 - |u_i - v_a|^2.
double joint_log_likelihood(const SocialNetwork& yi, const AttributeMatrix& yia,
                            const LatentPositions& pos, const Intercepts& icpt);

/// Social-only and attribute-only variants used by the single-matrix models.
double social_log_likelihood(const SocialNetwork& yi, const Matrix& persons,
                             double alpha0);
double attribute_log_likelihood(const AttributeMatrix& yia, const Matrix& persons,
                                const Matrix& attributes, double alpha1);

}  // namespace aplsm
