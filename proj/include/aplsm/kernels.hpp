#pragma once

#include "aplsm/state.hpp"
#include "aplsm/types.hpp"

#include <vector>

namespace aplsm::kernels {

/// Shared per-sweep quantities for one side of the bound. For person-person
/// terms the convolution covariance is C = 4 * cov_persons; for
/// person-attribute terms C = 2 * cov_persons + 2 * cov_attributes. Every
/// pair (x, y) then enters through
///   t  = alpha - (x - y)' (I + C)^-1 (x - y) - 0.5 * log det(I + C)
///   s  = logistic(t)                      (expected-odds weight)
///   log(1 + exp(t))                       (log term of the bound)
struct PairKernel {
  Matrix b_inv;        // (I + C)^-1
  double half_logdet;  // 0.5 * log det(I + C)
  double trace_sum;    // 2 tr(cov0) or tr(cov0) + tr(cov1)
  double alpha;
};

PairKernel social_kernel(const VariationalState& state);
PairKernel bipartite_kernel(const VariationalState& state);

/// Sums over present ordered social dyads (i, j), i != j.
///
/// grad_means row i and hess_means[i] are the gradient and Hessian of person
/// i's partial sum of the social log terms (the terms where i is the source
/// index); by symmetry of the pair weights this is half the derivative of the
/// full double sum, which is the convention the closed-form mean update is
/// written in. With missing dyads each present direction contributes half
/// weight. All other fields accumulate over the full ordered double sum.
struct SocialSums {
  Matrix grad_means;               // N x D
  std::vector<Matrix> hess_means;  // N entries, each D x D
  Matrix grad_cov;                 // D x D, derivative w.r.t. cov_persons
  double grad_alpha = 0.0;
  double hess_alpha = 0.0;
  double log_terms = 0.0;     // sum log(1 + exp(t_ij))
  double bound_linear = 0.0;  // sum y_ij (alpha0 - 2 tr(cov0) - |u_i - u_j|^2)
};

/// Sums over present person-attribute cells. Gradients and Hessians here are
/// exact derivatives of the full cell sum (each mean appears in one row or
/// one column only). grad_cov0 and grad_cov1 coincide term by term because
/// the kernel depends on cov_persons and cov_attributes through their sum;
/// both are kept so every update reads the field it names.
struct BipartiteSums {
  Matrix grad_means_person;               // N x D
  Matrix grad_means_attr;                 // M x D
  std::vector<Matrix> hess_means_person;  // N entries
  std::vector<Matrix> hess_means_attr;    // M entries
  Matrix grad_cov0;                       // D x D
  Matrix grad_cov1;                       // D x D
  double grad_alpha = 0.0;
  double hess_alpha = 0.0;
  double log_terms = 0.0;
  double bound_linear = 0.0;
};

/// Log-term and linear pieces only; used by the objective evaluation.
struct BoundTerms {
  double log_terms = 0.0;
  double bound_linear = 0.0;
};

// Serial reference implementations.
SocialSums social_sums_serial(const Matrix& means, const PairKernel& k,
                              const SocialNetwork& yi);
BipartiteSums bipartite_sums_serial(const Matrix& persons, const Matrix& attrs,
                                    const PairKernel& k,
                                    const AttributeMatrix& yia);
BoundTerms social_bound_serial(const Matrix& means, const PairKernel& k,
                               const SocialNetwork& yi);
BoundTerms bipartite_bound_serial(const Matrix& persons, const Matrix& attrs,
                                  const PairKernel& k,
                                  const AttributeMatrix& yia);

// OpenMP implementations. Partial results are reduced in index order, so the
// output is identical (bitwise) for any thread count.
SocialSums social_sums_parallel(const Matrix& means, const PairKernel& k,
                                const SocialNetwork& yi);
BipartiteSums bipartite_sums_parallel(const Matrix& persons, const Matrix& attrs,
                                      const PairKernel& k,
                                      const AttributeMatrix& yia);
BoundTerms social_bound_parallel(const Matrix& means, const PairKernel& k,
                                 const SocialNetwork& yi);
BoundTerms bipartite_bound_parallel(const Matrix& persons, const Matrix& attrs,
                                    const PairKernel& k,
                                    const AttributeMatrix& yia);

}  // namespace aplsm::kernels
