#include "aplsm/kernels.hpp"

#include "aplsm/core_model.hpp"

#include <omp.h>

#include <vector>

// OpenMP variants of the accumulation passes. Rows are independent, so the
// person (or attribute) loop is parallel; globally reduced quantities are
// first written to per-row slots and then summed in row order, which keeps
// the result bitwise identical to the serial reference for any thread count.

namespace aplsm::kernels {

SocialSums social_sums_parallel(const Matrix& means, const PairKernel& k,
                                const SocialNetwork& yi) {
  const int n = yi.n_persons();
  const int d = static_cast<int>(means.cols());
  SocialSums out;
  out.grad_means = Matrix::Zero(n, d);
  out.hess_means.assign(n, Matrix::Zero(d, d));
  out.grad_cov = Matrix::Zero(d, d);

  std::vector<Matrix> cov_partial(n, Matrix::Zero(d, d));
  Vector ga = Vector::Zero(n), ha = Vector::Zero(n);
  Vector lt = Vector::Zero(n), bl = Vector::Zero(n);

#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    Vector delta(d), bdelta(d);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const bool fwd = yi.present(i, j);
      const bool bwd = yi.present(j, i);
      if (!fwd && !bwd) continue;
      delta = means.row(i) - means.row(j);
      bdelta.noalias() = k.b_inv * delta;
      const double q = delta.dot(bdelta);
      const double t = k.alpha - q - k.half_logdet;
      const double s = logistic(t);
      const double s1 = s * (1.0 - s);
      if (fwd) {
        lt(i) += log1p_exp(t);
        bl(i) += yi.value(i, j) * (k.alpha - k.trace_sum - delta.squaredNorm());
        ga(i) += s;
        ha(i) += s1;
        cov_partial[i].noalias() += (4.0 * s) * (bdelta * bdelta.transpose());
        cov_partial[i].noalias() += (-2.0 * s) * k.b_inv;
      }
      const double w = (fwd ? 1.0 : 0.0) + (bwd ? 1.0 : 0.0);
      out.grad_means.row(i) += (-w * s) * bdelta;
      out.hess_means[i].noalias() += (-w * s) * k.b_inv;
      out.hess_means[i].noalias() +=
          (2.0 * w * s1) * (bdelta * bdelta.transpose());
    }
  }

  for (int i = 0; i < n; ++i) {
    out.grad_cov += cov_partial[i];
    out.grad_alpha += ga(i);
    out.hess_alpha += ha(i);
    out.log_terms += lt(i);
    out.bound_linear += bl(i);
  }
  return out;
}

BipartiteSums bipartite_sums_parallel(const Matrix& persons, const Matrix& attrs,
                                      const PairKernel& k,
                                      const AttributeMatrix& yia) {
  const int n = yia.n_persons();
  const int m = yia.n_attributes();
  const int d = static_cast<int>(persons.cols());
  BipartiteSums out;
  out.grad_means_person = Matrix::Zero(n, d);
  out.grad_means_attr = Matrix::Zero(m, d);
  out.hess_means_person.assign(n, Matrix::Zero(d, d));
  out.hess_means_attr.assign(m, Matrix::Zero(d, d));
  out.grad_cov0 = Matrix::Zero(d, d);
  out.grad_cov1 = Matrix::Zero(d, d);

  std::vector<Matrix> cov_partial(n, Matrix::Zero(d, d));
  Vector ga = Vector::Zero(n), ha = Vector::Zero(n);
  Vector lt = Vector::Zero(n), bl = Vector::Zero(n);

#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    Vector delta(d), bdelta(d);
    for (int a = 0; a < m; ++a) {
      if (!yia.present(i, a)) continue;
      delta = persons.row(i) - attrs.row(a);
      bdelta.noalias() = k.b_inv * delta;
      const double q = delta.dot(bdelta);
      const double t = k.alpha - q - k.half_logdet;
      const double s = logistic(t);
      const double s1 = s * (1.0 - s);
      lt(i) += log1p_exp(t);
      bl(i) += yia.value(i, a) * (k.alpha - k.trace_sum - delta.squaredNorm());
      ga(i) += s;
      ha(i) += s1;
      cov_partial[i].noalias() += (2.0 * s) * (bdelta * bdelta.transpose());
      cov_partial[i].noalias() += (-1.0 * s) * k.b_inv;
      out.grad_means_person.row(i) += (-2.0 * s) * bdelta;
      out.hess_means_person[i].noalias() += (-2.0 * s) * k.b_inv;
      out.hess_means_person[i].noalias() +=
          (4.0 * s1) * (bdelta * bdelta.transpose());
    }
  }

  for (int i = 0; i < n; ++i) {
    out.grad_cov0 += cov_partial[i];
    out.grad_alpha += ga(i);
    out.hess_alpha += ha(i);
    out.log_terms += lt(i);
    out.bound_linear += bl(i);
  }
  out.grad_cov1 = out.grad_cov0;

#pragma omp parallel for schedule(static)
  for (int a = 0; a < m; ++a) {
    Vector delta(d), bdelta(d);
    for (int i = 0; i < n; ++i) {
      if (!yia.present(i, a)) continue;
      delta = persons.row(i) - attrs.row(a);
      bdelta.noalias() = k.b_inv * delta;
      const double q = delta.dot(bdelta);
      const double t = k.alpha - q - k.half_logdet;
      const double s = logistic(t);
      const double s1 = s * (1.0 - s);
      out.grad_means_attr.row(a) += (2.0 * s) * bdelta;
      out.hess_means_attr[a].noalias() += (-2.0 * s) * k.b_inv;
      out.hess_means_attr[a].noalias() +=
          (4.0 * s1) * (bdelta * bdelta.transpose());
    }
  }
  return out;
}

BoundTerms social_bound_parallel(const Matrix& means, const PairKernel& k,
                                 const SocialNetwork& yi) {
  const int n = yi.n_persons();
  const int d = static_cast<int>(means.cols());
  Vector lt = Vector::Zero(n), bl = Vector::Zero(n);

#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    Vector delta(d), bdelta(d);
    for (int j = 0; j < n; ++j) {
      if (!yi.present(i, j)) continue;
      delta = means.row(i) - means.row(j);
      bdelta.noalias() = k.b_inv * delta;
      const double t = k.alpha - delta.dot(bdelta) - k.half_logdet;
      lt(i) += log1p_exp(t);
      bl(i) += yi.value(i, j) * (k.alpha - k.trace_sum - delta.squaredNorm());
    }
  }

  BoundTerms out;
  for (int i = 0; i < n; ++i) {
    out.log_terms += lt(i);
    out.bound_linear += bl(i);
  }
  return out;
}

BoundTerms bipartite_bound_parallel(const Matrix& persons, const Matrix& attrs,
                                    const PairKernel& k,
                                    const AttributeMatrix& yia) {
  const int n = yia.n_persons();
  const int m = yia.n_attributes();
  const int d = static_cast<int>(persons.cols());
  Vector lt = Vector::Zero(n), bl = Vector::Zero(n);

#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    Vector delta(d), bdelta(d);
    for (int a = 0; a < m; ++a) {
      if (!yia.present(i, a)) continue;
      delta = persons.row(i) - attrs.row(a);
      bdelta.noalias() = k.b_inv * delta;
      const double t = k.alpha - delta.dot(bdelta) - k.half_logdet;
      lt(i) += log1p_exp(t);
      bl(i) += yia.value(i, a) * (k.alpha - k.trace_sum - delta.squaredNorm());
    }
  }

  BoundTerms out;
  for (int i = 0; i < n; ++i) {
    out.log_terms += lt(i);
    out.bound_linear += bl(i);
  }
  return out;
}

}  // namespace aplsm::kernels
