#include "aplsm/kernels.hpp"

#include "aplsm/core_model.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <stdexcept>

namespace aplsm::kernels {

namespace {

PairKernel make_kernel(const Matrix& conv_cov, double trace_sum, double alpha) {
  const int d = static_cast<int>(conv_cov.rows());
  const Matrix b = Matrix::Identity(d, d) + conv_cov;
  Eigen::LLT<Matrix> llt(b);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("pair kernel: I + C is not positive definite");
  }
  double logdet = 0.0;
  for (int k = 0; k < d; ++k) logdet += 2.0 * std::log(llt.matrixL()(k, k));
  return {llt.solve(Matrix::Identity(d, d)), 0.5 * logdet, trace_sum, alpha};
}

}  // namespace

PairKernel social_kernel(const VariationalState& state) {
  return make_kernel(4.0 * state.cov_persons, 2.0 * state.cov_persons.trace(),
                     state.alpha0);
}

PairKernel bipartite_kernel(const VariationalState& state) {
  return make_kernel(2.0 * state.cov_persons + 2.0 * state.cov_attributes,
                     state.cov_persons.trace() + state.cov_attributes.trace(),
                     state.alpha1);
}

SocialSums social_sums_serial(const Matrix& means, const PairKernel& k,
                              const SocialNetwork& yi) {
  const int n = yi.n_persons();
  const int d = static_cast<int>(means.cols());
  SocialSums out;
  out.grad_means = Matrix::Zero(n, d);
  out.hess_means.assign(n, Matrix::Zero(d, d));
  out.grad_cov = Matrix::Zero(d, d);

  Vector delta(d), bdelta(d);
  for (int i = 0; i < n; ++i) {
    Matrix cov_i = Matrix::Zero(d, d);
    double ga = 0.0, ha = 0.0, lt = 0.0, bl = 0.0;
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
        lt += log1p_exp(t);
        bl += yi.value(i, j) * (k.alpha - k.trace_sum - delta.squaredNorm());
        ga += s;
        ha += s1;
        cov_i.noalias() += (4.0 * s) * (bdelta * bdelta.transpose());
        cov_i.noalias() += (-2.0 * s) * k.b_inv;
      }
      const double w = (fwd ? 1.0 : 0.0) + (bwd ? 1.0 : 0.0);
      out.grad_means.row(i) += (-w * s) * bdelta;
      out.hess_means[i].noalias() += (-w * s) * k.b_inv;
      out.hess_means[i].noalias() +=
          (2.0 * w * s1) * (bdelta * bdelta.transpose());
    }
    out.grad_cov += cov_i;
    out.grad_alpha += ga;
    out.hess_alpha += ha;
    out.log_terms += lt;
    out.bound_linear += bl;
  }
  return out;
}

BipartiteSums bipartite_sums_serial(const Matrix& persons, const Matrix& attrs,
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

  Vector delta(d), bdelta(d);
  for (int i = 0; i < n; ++i) {
    Matrix cov_i = Matrix::Zero(d, d);
    double ga = 0.0, ha = 0.0, lt = 0.0, bl = 0.0;
    for (int a = 0; a < m; ++a) {
      if (!yia.present(i, a)) continue;
      delta = persons.row(i) - attrs.row(a);
      bdelta.noalias() = k.b_inv * delta;
      const double q = delta.dot(bdelta);
      const double t = k.alpha - q - k.half_logdet;
      const double s = logistic(t);
      const double s1 = s * (1.0 - s);
      lt += log1p_exp(t);
      bl += yia.value(i, a) * (k.alpha - k.trace_sum - delta.squaredNorm());
      ga += s;
      ha += s1;
      cov_i.noalias() += (2.0 * s) * (bdelta * bdelta.transpose());
      cov_i.noalias() += (-1.0 * s) * k.b_inv;
      out.grad_means_person.row(i) += (-2.0 * s) * bdelta;
      out.hess_means_person[i].noalias() += (-2.0 * s) * k.b_inv;
      out.hess_means_person[i].noalias() +=
          (4.0 * s1) * (bdelta * bdelta.transpose());
    }
    out.grad_cov0 += cov_i;
    out.grad_alpha += ga;
    out.hess_alpha += ha;
    out.log_terms += lt;
    out.bound_linear += bl;
  }
  out.grad_cov1 = out.grad_cov0;

  // Attribute-side means: each column of the cell sum.
  for (int a = 0; a < m; ++a) {
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

BoundTerms social_bound_serial(const Matrix& means, const PairKernel& k,
                               const SocialNetwork& yi) {
  const int n = yi.n_persons();
  const int d = static_cast<int>(means.cols());
  BoundTerms out;
  Vector delta(d), bdelta(d);
  for (int i = 0; i < n; ++i) {
    double lt = 0.0, bl = 0.0;
    for (int j = 0; j < n; ++j) {
      if (!yi.present(i, j)) continue;
      delta = means.row(i) - means.row(j);
      bdelta.noalias() = k.b_inv * delta;
      const double t = k.alpha - delta.dot(bdelta) - k.half_logdet;
      lt += log1p_exp(t);
      bl += yi.value(i, j) * (k.alpha - k.trace_sum - delta.squaredNorm());
    }
    out.log_terms += lt;
    out.bound_linear += bl;
  }
  return out;
}

BoundTerms bipartite_bound_serial(const Matrix& persons, const Matrix& attrs,
                                  const PairKernel& k,
                                  const AttributeMatrix& yia) {
  const int n = yia.n_persons();
  const int m = yia.n_attributes();
  const int d = static_cast<int>(persons.cols());
  BoundTerms out;
  Vector delta(d), bdelta(d);
  for (int i = 0; i < n; ++i) {
    double lt = 0.0, bl = 0.0;
    for (int a = 0; a < m; ++a) {
      if (!yia.present(i, a)) continue;
      delta = persons.row(i) - attrs.row(a);
      bdelta.noalias() = k.b_inv * delta;
      const double t = k.alpha - delta.dot(bdelta) - k.half_logdet;
      lt += log1p_exp(t);
      bl += yia.value(i, a) * (k.alpha - k.trace_sum - delta.squaredNorm());
    }
    out.log_terms += lt;
    out.bound_linear += bl;
  }
  return out;
}

}  // namespace aplsm::kernels
