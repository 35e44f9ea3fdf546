#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "aplsm/kernels.hpp"
#include "aplsm/rng.hpp"

#include <cmath>

using namespace aplsm;
using namespace aplsm::kernels;

namespace {

struct Instance {
  VariationalState state;
  SocialNetwork yi;
  AttributeMatrix yia;
};

Instance random_instance(std::uint64_t seed, int n, int m, int d,
                         bool directed = false, double missing_rate = 0.0) {
  Rng rng(seed);
  BinaryMatrix yi(n, n);
  yi.setZero();
  if (directed) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        yi(i, j) = rng.bernoulli(missing_rate) ? kMissing
                                               : (rng.bernoulli(0.4) ? 1 : 0);
      }
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const std::int8_t v = rng.bernoulli(missing_rate)
                                  ? kMissing
                                  : (rng.bernoulli(0.4) ? 1 : 0);
        yi(i, j) = v;
        yi(j, i) = v;
      }
  }
  BinaryMatrix ym(n, m);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < m; ++a) {
      ym(i, a) = rng.bernoulli(missing_rate) ? kMissing
                                             : (rng.bernoulli(0.5) ? 1 : 0);
    }

  VariationalState state;
  state.mean_persons = Matrix(n, d);
  state.mean_attributes = Matrix(m, d);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k) state.mean_persons(i, k) = rng.normal();
  for (int a = 0; a < m; ++a)
    for (int k = 0; k < d; ++k) state.mean_attributes(a, k) = rng.normal();
  Matrix l0 = Matrix::Random(d, d);
  state.cov_persons = 0.05 * Matrix::Identity(d, d) + 0.02 * (l0 * l0.transpose());
  Matrix l1 = Matrix::Random(d, d);
  state.cov_attributes =
      0.08 * Matrix::Identity(d, d) + 0.02 * (l1 * l1.transpose());
  state.alpha0 = 0.5 + rng.normal();
  state.alpha1 = -0.2 + rng.normal();
  return {state, SocialNetwork(std::move(yi), directed),
          AttributeMatrix(std::move(ym))};
}

void check_social_equal(const SocialSums& a, const SocialSums& b) {
  CHECK((a.grad_means - b.grad_means).cwiseAbs().maxCoeff() == 0.0);
  for (std::size_t i = 0; i < a.hess_means.size(); ++i) {
    CHECK((a.hess_means[i] - b.hess_means[i]).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK((a.grad_cov - b.grad_cov).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.grad_alpha == b.grad_alpha);
  CHECK(a.hess_alpha == b.hess_alpha);
  CHECK(a.log_terms == b.log_terms);
  CHECK(a.bound_linear == b.bound_linear);
}

void check_bipartite_equal(const BipartiteSums& a, const BipartiteSums& b) {
  CHECK((a.grad_means_person - b.grad_means_person).cwiseAbs().maxCoeff() ==
        0.0);
  CHECK((a.grad_means_attr - b.grad_means_attr).cwiseAbs().maxCoeff() == 0.0);
  for (std::size_t i = 0; i < a.hess_means_person.size(); ++i) {
    CHECK((a.hess_means_person[i] - b.hess_means_person[i])
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
  for (std::size_t i = 0; i < a.hess_means_attr.size(); ++i) {
    CHECK((a.hess_means_attr[i] - b.hess_means_attr[i]).cwiseAbs().maxCoeff() ==
          0.0);
  }
  CHECK((a.grad_cov0 - b.grad_cov0).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.grad_cov1 - b.grad_cov1).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.grad_alpha == b.grad_alpha);
  CHECK(a.hess_alpha == b.hess_alpha);
  CHECK(a.log_terms == b.log_terms);
  CHECK(a.bound_linear == b.bound_linear);
}

}  // namespace

TEST_CASE("parallel sums match the serial reference exactly") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL}) {
    for (bool directed : {false, true}) {
      const auto inst =
          random_instance(seed, 13, 9, 2, directed, seed % 2 ? 0.15 : 0.0);
      const PairKernel ks = social_kernel(inst.state);
      const PairKernel kb = bipartite_kernel(inst.state);

      check_social_equal(
          social_sums_serial(inst.state.mean_persons, ks, inst.yi),
          social_sums_parallel(inst.state.mean_persons, ks, inst.yi));
      check_bipartite_equal(
          bipartite_sums_serial(inst.state.mean_persons,
                                inst.state.mean_attributes, kb, inst.yia),
          bipartite_sums_parallel(inst.state.mean_persons,
                                  inst.state.mean_attributes, kb, inst.yia));

      const auto bs = social_bound_serial(inst.state.mean_persons, ks, inst.yi);
      const auto bp =
          social_bound_parallel(inst.state.mean_persons, ks, inst.yi);
      CHECK(bs.log_terms == bp.log_terms);
      CHECK(bs.bound_linear == bp.bound_linear);

      const auto cs = bipartite_bound_serial(
          inst.state.mean_persons, inst.state.mean_attributes, kb, inst.yia);
      const auto cp = bipartite_bound_parallel(
          inst.state.mean_persons, inst.state.mean_attributes, kb, inst.yia);
      CHECK(cs.log_terms == cp.log_terms);
      CHECK(cs.bound_linear == cp.bound_linear);
    }
  }
}

TEST_CASE("pair kernel for an isotropic covariance") {
  VariationalState state;
  const int d = 2;
  state.mean_persons = Matrix::Zero(3, d);
  state.mean_attributes = Matrix::Zero(2, d);
  state.cov_persons = 0.1 * Matrix::Identity(d, d);
  state.cov_attributes = 0.2 * Matrix::Identity(d, d);
  state.alpha0 = 1.0;
  state.alpha1 = -1.0;

  const PairKernel ks = social_kernel(state);
  CHECK(ks.b_inv(0, 0) == doctest::Approx(1.0 / 1.4));
  CHECK(ks.b_inv(0, 1) == doctest::Approx(0.0));
  CHECK(ks.half_logdet == doctest::Approx(0.5 * 2.0 * std::log(1.4)));
  CHECK(ks.trace_sum == doctest::Approx(2.0 * 0.2));
  CHECK(ks.alpha == 1.0);

  const PairKernel kb = bipartite_kernel(state);
  CHECK(kb.b_inv(1, 1) == doctest::Approx(1.0 / 1.6));
  CHECK(kb.trace_sum == doctest::Approx(0.2 + 0.4));
  CHECK(kb.alpha == -1.0);
}

TEST_CASE("coincident means zero the social mean gradient") {
  auto inst = random_instance(5, 8, 4, 3);
  inst.state.mean_persons.setZero();
  const auto sums = social_sums_serial(inst.state.mean_persons,
                                       social_kernel(inst.state), inst.yi);
  CHECK(sums.grad_means.cwiseAbs().maxCoeff() == 0.0);
  // Curvature of the intercept term is a sum of sigmoid products.
  CHECK(sums.hess_alpha > 0.0);
}

TEST_CASE("alpha curvature is positive on any finite state") {
  for (std::uint64_t seed : {11ULL, 12ULL, 13ULL}) {
    const auto inst = random_instance(seed, 6, 5, 2);
    const auto social = social_sums_serial(inst.state.mean_persons,
                                           social_kernel(inst.state), inst.yi);
    const auto bip = bipartite_sums_serial(inst.state.mean_persons,
                                           inst.state.mean_attributes,
                                           bipartite_kernel(inst.state),
                                           inst.yia);
    CHECK(social.hess_alpha > 0.0);
    CHECK(bip.hess_alpha > 0.0);
  }
}
