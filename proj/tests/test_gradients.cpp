#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "aplsm/kernels.hpp"
#include "aplsm/rng.hpp"
#include "aplsm/vbem.hpp"

#include <Eigen/LU>

#include <cmath>

using namespace aplsm;

// Finite-difference oracle for the closed-form derivative pieces. The log-sum
// functions are re-evaluated here from scratch (general inverse and
// determinant, no shared kernel code) so the check is independent of the
// implementation path.
namespace {

double log_sum_social_row(const VariationalState& s, int i) {
  const int d = s.dim();
  const Matrix b = Matrix::Identity(d, d) + 4.0 * s.cov_persons;
  const Matrix binv = b.inverse();
  const double half_logdet = 0.5 * std::log(b.determinant());
  double total = 0.0;
  for (int j = 0; j < s.n_persons(); ++j) {
    if (j == i) continue;
    const Vector delta = s.mean_persons.row(i) - s.mean_persons.row(j);
    const double t = s.alpha0 - delta.dot(binv * delta) - half_logdet;
    total += std::log1p(std::exp(t));
  }
  return total;
}

double log_sum_social_full(const VariationalState& s) {
  double total = 0.0;
  for (int i = 0; i < s.n_persons(); ++i) total += log_sum_social_row(s, i);
  return total;
}

double log_sum_bipartite(const VariationalState& s) {
  const int d = s.dim();
  const Matrix b =
      Matrix::Identity(d, d) + 2.0 * s.cov_persons + 2.0 * s.cov_attributes;
  const Matrix binv = b.inverse();
  const double half_logdet = 0.5 * std::log(b.determinant());
  double total = 0.0;
  for (int i = 0; i < s.n_persons(); ++i) {
    for (int a = 0; a < s.n_attributes(); ++a) {
      const Vector delta = s.mean_persons.row(i) - s.mean_attributes.row(a);
      const double t = s.alpha1 - delta.dot(binv * delta) - half_logdet;
      total += std::log1p(std::exp(t));
    }
  }
  return total;
}

VariationalState random_state(std::uint64_t seed, int n, int m, int d) {
  Rng rng(seed);
  VariationalState s;
  s.mean_persons = Matrix(n, d);
  s.mean_attributes = Matrix(m, d);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k) s.mean_persons(i, k) = 0.8 * rng.normal();
  for (int a = 0; a < m; ++a)
    for (int k = 0; k < d; ++k) s.mean_attributes(a, k) = 0.8 * rng.normal();
  Matrix l0(d, d), l1(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) {
      l0(r, c) = 0.15 * rng.normal();
      l1(r, c) = 0.15 * rng.normal();
    }
  s.cov_persons = 0.1 * Matrix::Identity(d, d) + l0 * l0.transpose();
  s.cov_attributes = 0.12 * Matrix::Identity(d, d) + l1 * l1.transpose();
  s.alpha0 = rng.normal();
  s.alpha1 = rng.normal();
  return s;
}

SocialNetwork dense_network(int n) {
  BinaryMatrix yi(n, n);
  yi.setZero();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      yi(i, j) = 1;
      yi(j, i) = 1;
    }
  return SocialNetwork(std::move(yi));
}

AttributeMatrix dense_attributes(int n, int m) {
  BinaryMatrix ym(n, m);
  ym.setOnes();
  return AttributeMatrix(std::move(ym));
}

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-6);
}

constexpr double kGradStep = 1e-5;
constexpr double kHessStep = 5e-4;
constexpr double kRelTol = 1e-4;

template <typename F>
double central_diff(F f, double* slot, double h) {
  const double saved = *slot;
  *slot = saved + h;
  const double up = f();
  *slot = saved - h;
  const double down = f();
  *slot = saved;
  return (up - down) / (2.0 * h);
}

template <typename F>
double central_second(F f, double* s1, double* s2, double h) {
  const double a = *s1, b = *s2;
  double value = 0.0;
  *s1 = a + h;
  *s2 = b + h;
  value += f();
  *s1 = a + h;
  *s2 = b - h;
  value -= f();
  *s1 = a - h;
  *s2 = b + h;
  value -= f();
  *s1 = a - h;
  *s2 = b - h;
  value += f();
  *s1 = a;
  *s2 = b;
  return value / (4.0 * h * h);
}

}  // namespace

TEST_CASE("all thirteen derivative components match finite differences") {
  const int n = 3, m = 2, d = 2;
  const SocialNetwork yi = dense_network(n);
  const AttributeMatrix yia = dense_attributes(n, m);
  const LatentConfig config{d, 1.0, 1.0};

  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    VariationalState s = random_state(seed, n, m, d);
    const GradientBundle bundle = objective_gradients(s, &yi, &yia, config);

    // Person-mean derivatives of the social row partial sums.
    for (int i = 0; i < n; ++i) {
      auto f_row = [&] { return log_sum_social_row(s, i); };
      for (int k = 0; k < d; ++k) {
        const double fd = central_diff(f_row, &s.mean_persons(i, k), kGradStep);
        CHECK(rel_err(bundle.social.grad_means(i, k), fd) < kRelTol);
      }
      for (int k = 0; k < d; ++k) {
        for (int l = 0; l < d; ++l) {
          double fd;
          if (k == l) {
            const double base = f_row();
            const double saved = s.mean_persons(i, k);
            s.mean_persons(i, k) = saved + kHessStep;
            const double up = f_row();
            s.mean_persons(i, k) = saved - kHessStep;
            const double down = f_row();
            s.mean_persons(i, k) = saved;
            fd = (up - 2.0 * base + down) / (kHessStep * kHessStep);
          } else {
            fd = central_second(f_row, &s.mean_persons(i, k),
                                &s.mean_persons(i, l), kHessStep);
          }
          CHECK(rel_err(bundle.social.hess_means[i](k, l), fd) < kRelTol);
        }
      }
    }

    // Person- and attribute-mean derivatives of the bipartite sum.
    auto f_bip = [&] { return log_sum_bipartite(s); };
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < d; ++k) {
        const double fd = central_diff(f_bip, &s.mean_persons(i, k), kGradStep);
        CHECK(rel_err(bundle.bipartite.grad_means_person(i, k), fd) < kRelTol);
      }
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
          double fd;
          if (k == l) {
            const double base = f_bip();
            const double saved = s.mean_persons(i, k);
            s.mean_persons(i, k) = saved + kHessStep;
            const double up = f_bip();
            s.mean_persons(i, k) = saved - kHessStep;
            const double down = f_bip();
            s.mean_persons(i, k) = saved;
            fd = (up - 2.0 * base + down) / (kHessStep * kHessStep);
          } else {
            fd = central_second(f_bip, &s.mean_persons(i, k),
                                &s.mean_persons(i, l), kHessStep);
          }
          CHECK(rel_err(bundle.bipartite.hess_means_person[i](k, l), fd) <
                kRelTol);
        }
    }
    for (int a = 0; a < m; ++a) {
      for (int k = 0; k < d; ++k) {
        const double fd =
            central_diff(f_bip, &s.mean_attributes(a, k), kGradStep);
        CHECK(rel_err(bundle.bipartite.grad_means_attr(a, k), fd) < kRelTol);
      }
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
          double fd;
          if (k == l) {
            const double base = f_bip();
            const double saved = s.mean_attributes(a, k);
            s.mean_attributes(a, k) = saved + kHessStep;
            const double up = f_bip();
            s.mean_attributes(a, k) = saved - kHessStep;
            const double down = f_bip();
            s.mean_attributes(a, k) = saved;
            fd = (up - 2.0 * base + down) / (kHessStep * kHessStep);
          } else {
            fd = central_second(f_bip, &s.mean_attributes(a, k),
                                &s.mean_attributes(a, l), kHessStep);
          }
          CHECK(rel_err(bundle.bipartite.hess_means_attr[a](k, l), fd) <
                kRelTol);
        }
    }

    // Covariance gradients (entrywise, unconstrained perturbation).
    auto f_soc = [&] { return log_sum_social_full(s); };
    for (int k = 0; k < d; ++k)
      for (int l = 0; l < d; ++l) {
        const double fd_soc =
            central_diff(f_soc, &s.cov_persons(k, l), kGradStep);
        CHECK(rel_err(bundle.social.grad_cov(k, l), fd_soc) < kRelTol);
        const double fd_bip0 =
            central_diff(f_bip, &s.cov_persons(k, l), kGradStep);
        CHECK(rel_err(bundle.bipartite.grad_cov0(k, l), fd_bip0) < kRelTol);
        const double fd_bip1 =
            central_diff(f_bip, &s.cov_attributes(k, l), kGradStep);
        CHECK(rel_err(bundle.bipartite.grad_cov1(k, l), fd_bip1) < kRelTol);
      }

    // Intercept first and second derivatives.
    const double g0 = central_diff(f_soc, &s.alpha0, kGradStep);
    CHECK(rel_err(bundle.social.grad_alpha, g0) < kRelTol);
    auto g0f = [&] {
      const GradientBundle b2 = objective_gradients(s, &yi, &yia, config);
      return b2.social.grad_alpha;
    };
    const double h0 = central_diff(g0f, &s.alpha0, kGradStep);
    CHECK(rel_err(bundle.social.hess_alpha, h0) < kRelTol);

    const double g1 = central_diff(f_bip, &s.alpha1, kGradStep);
    CHECK(rel_err(bundle.bipartite.grad_alpha, g1) < kRelTol);
    auto g1f = [&] {
      const GradientBundle b2 = objective_gradients(s, &yi, &yia, config);
      return b2.bipartite.grad_alpha;
    };
    const double h1 = central_diff(g1f, &s.alpha1, kGradStep);
    CHECK(rel_err(bundle.bipartite.hess_alpha, h1) < kRelTol);
  }
}

TEST_CASE("gradient bundle respects model sides") {
  const int n = 4, m = 3, d = 2;
  const SocialNetwork yi = dense_network(n);
  const AttributeMatrix yia = dense_attributes(n, m);
  const LatentConfig config{d, 1.0, 1.0};
  VariationalState s = random_state(3, n, m, d);

  const GradientBundle social_only = objective_gradients(s, &yi, nullptr, config);
  CHECK(social_only.has_social);
  CHECK(!social_only.has_bipartite);

  const GradientBundle attr_only = objective_gradients(s, nullptr, &yia, config);
  CHECK(!attr_only.has_social);
  CHECK(attr_only.has_bipartite);

  CHECK_THROWS_AS(objective_gradients(s, nullptr, nullptr, config),
                  std::invalid_argument);
}
