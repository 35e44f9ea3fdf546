#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "aplsm/core_model.hpp"
#include "aplsm/rng.hpp"

#include <cmath>

using namespace aplsm;

namespace {

BinaryMatrix path_graph3() {
  BinaryMatrix m(3, 3);
  m << 0, 1, 0,
       1, 0, 1,
       0, 1, 0;
  return m;
}

// Independent naive transcription: no stable branches, plain double loops.
double naive_log_likelihood(const SocialNetwork& yi, const AttributeMatrix& yia,
                            const LatentPositions& pos, const Intercepts& icpt) {
  double ll = 0.0;
  for (int i = 0; i < yi.n_persons(); ++i) {
    for (int j = 0; j < yi.n_persons(); ++j) {
      if (i == j || !yi.present(i, j)) continue;
      double d2 = 0.0;
      for (int k = 0; k < pos.persons.cols(); ++k) {
        const double diff = pos.persons(i, k) - pos.persons(j, k);
        d2 += diff * diff;
      }
      const double p = std::exp(icpt.alpha0 - d2) / (1.0 + std::exp(icpt.alpha0 - d2));
      ll += yi.value(i, j) > 0.5 ? std::log(p) : std::log(1.0 - p);
    }
  }
  for (int i = 0; i < yia.n_persons(); ++i) {
    for (int a = 0; a < yia.n_attributes(); ++a) {
      if (!yia.present(i, a)) continue;
      double d2 = 0.0;
      for (int k = 0; k < pos.persons.cols(); ++k) {
        const double diff = pos.persons(i, k) - pos.attributes(a, k);
        d2 += diff * diff;
      }
      const double p = std::exp(icpt.alpha1 - d2) / (1.0 + std::exp(icpt.alpha1 - d2));
      ll += yia.value(i, a) > 0.5 ? std::log(p) : std::log(1.0 - p);
    }
  }
  return ll;
}

}  // namespace

TEST_CASE("squared_distance basics") {
  Vector x(3), y(3);
  x << 1.5, -2.0, 0.25;
  y = x;
  CHECK(squared_distance(x, y) == 0.0);

  Vector a(2), b(2);
  a << 1, 0;
  b << 0, 1;
  CHECK(squared_distance(a, b) == doctest::Approx(2.0));
  CHECK(squared_distance(a, b) == squared_distance(b, a));
}

TEST_CASE("squared_distance matches an element-wise loop") {
  Rng rng(7);
  Vector x(5), y(5);
  for (int k = 0; k < 5; ++k) {
    x(k) = rng.normal();
    y(k) = rng.normal();
  }
  double expected = 0.0;
  for (int k = 0; k < 5; ++k) expected += (x(k) - y(k)) * (x(k) - y(k));
  CHECK(squared_distance(x, y) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("squared_distance rejects mismatched dimensions") {
  Vector x(2), y(3);
  x.setZero();
  y.setZero();
  CHECK_THROWS_AS(squared_distance(x, y), std::invalid_argument);
}

TEST_CASE("logistic link values") {
  CHECK(link_probability(0.0, LinkFamily::bernoulli_logistic).primary == 0.5);

  // theta = alpha0 - |u_i - u_j|^2 with coincident positions and alpha0 = 2.
  const long double e2 = std::exp(2.0L);
  const double expected = static_cast<double>(e2 / (1.0L + e2));
  CHECK(link_probability(2.0, LinkFamily::bernoulli_logistic).primary ==
        doctest::Approx(expected).epsilon(1e-15));

  // Saturation without overflow.
  const double low = link_probability(-1e6, LinkFamily::bernoulli_logistic).primary;
  CHECK(low >= 0.0);
  CHECK(low < 1e-300);
  CHECK(std::isfinite(low));
  CHECK(link_probability(1e6, LinkFamily::bernoulli_logistic).primary == 1.0);
}

TEST_CASE("logistic complement identity") {
  Rng rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    const double theta = 20.0 * (rng.uniform() - 0.5);
    CHECK(logistic(theta) + logistic(-theta) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("poisson and zero-inflated links") {
  const LinkValue pois = link_probability(1.3, LinkFamily::poisson_log);
  CHECK(pois.primary == doctest::Approx(std::exp(1.3)));

  const LinkValue zip = link_probability(0.7, LinkFamily::zero_inflated_poisson);
  CHECK(zip.primary == doctest::Approx(logistic(0.7)));
  CHECK(zip.rate == doctest::Approx(std::exp(0.7)));
}

TEST_CASE("joint log-likelihood at the symmetric zero-logit point") {
  // All positions at the origin with zero intercepts: every present term is
  // a fair coin, so the value is (#terms) * log(1/2).
  BinaryMatrix yi(2, 2);
  yi << 0, 1, 1, 0;
  BinaryMatrix yia(2, 1);
  yia << 1, 1;
  LatentPositions pos{Matrix::Zero(2, 2), Matrix::Zero(1, 2)};

  const double full = joint_log_likelihood(
      SocialNetwork(yi), AttributeMatrix(yia), pos, Intercepts{0.0, 0.0});
  CHECK(full == doctest::Approx(4.0 * std::log(0.5)).epsilon(1e-12));

  // Two ordered dyad terms plus one bipartite term.
  yia(1, 0) = kMissing;
  const double three = joint_log_likelihood(
      SocialNetwork(yi), AttributeMatrix(yia), pos, Intercepts{0.0, 0.0});
  CHECK(three == doctest::Approx(3.0 * std::log(0.5)).epsilon(1e-12));
}

TEST_CASE("joint log-likelihood matches a brute-force oracle") {
  Rng rng(23);
  const int n = 3, m = 2, d = 1;
  BinaryMatrix yi(n, n);
  yi.setZero();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      yi(i, j) = rng.bernoulli(0.5) ? 1 : 0;
      yi(j, i) = yi(i, j);
    }
  BinaryMatrix ym(n, m);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < m; ++a) ym(i, a) = rng.bernoulli(0.5) ? 1 : 0;
  LatentPositions pos{Matrix(n, d), Matrix(m, d)};
  for (int i = 0; i < n; ++i) pos.persons(i, 0) = rng.normal();
  for (int a = 0; a < m; ++a) pos.attributes(a, 0) = rng.normal();
  const Intercepts icpt{0.4, -0.3};

  const SocialNetwork sn(yi);
  const AttributeMatrix am(ym);
  CHECK(joint_log_likelihood(sn, am, pos, icpt) ==
        doctest::Approx(naive_log_likelihood(sn, am, pos, icpt)).epsilon(1e-10));
}

TEST_CASE("joint log-likelihood is translation and rotation invariant") {
  Rng rng(31);
  const int n = 4, m = 3, d = 2;
  BinaryMatrix yi(n, n);
  yi.setZero();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      yi(i, j) = rng.bernoulli(0.4) ? 1 : 0;
      yi(j, i) = yi(i, j);
    }
  BinaryMatrix ym(n, m);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < m; ++a) ym(i, a) = rng.bernoulli(0.5) ? 1 : 0;
  LatentPositions pos{Matrix(n, d), Matrix(m, d)};
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k) pos.persons(i, k) = rng.normal();
  for (int a = 0; a < m; ++a)
    for (int k = 0; k < d; ++k) pos.attributes(a, k) = rng.normal();
  const Intercepts icpt{0.8, 0.1};
  const SocialNetwork sn(yi);
  const AttributeMatrix am(ym);
  const double base = joint_log_likelihood(sn, am, pos, icpt);

  const double angle = 1.234;
  Matrix q(2, 2);
  q << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  Eigen::RowVector2d shift(0.7, -2.1);

  LatentPositions moved{(pos.persons * q).rowwise() + shift,
                        (pos.attributes * q).rowwise() + shift};
  CHECK(joint_log_likelihood(sn, am, moved, icpt) ==
        doctest::Approx(base).epsilon(1e-10));
}

TEST_CASE("joint log-likelihood is node-swap equivariant") {
  Rng rng(37);
  const int n = 5, m = 2, d = 2;
  BinaryMatrix yi(n, n);
  yi.setZero();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      yi(i, j) = rng.bernoulli(0.5) ? 1 : 0;
      yi(j, i) = yi(i, j);
    }
  BinaryMatrix ym(n, m);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < m; ++a) ym(i, a) = rng.bernoulli(0.5) ? 1 : 0;
  Matrix u(n, d), v(m, d);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k) u(i, k) = rng.normal();
  for (int a = 0; a < m; ++a)
    for (int k = 0; k < d; ++k) v(a, k) = rng.normal();
  const Intercepts icpt{0.5, 0.5};

  const double base = joint_log_likelihood(
      SocialNetwork(yi), AttributeMatrix(ym), LatentPositions{u, v}, icpt);

  // Swap persons 0 and 3 jointly in Y_I, Y_IA and U.
  std::vector<int> perm{3, 1, 2, 0, 4};
  BinaryMatrix yi_p(n, n);
  BinaryMatrix ym_p(n, m);
  Matrix u_p(n, d);
  for (int i = 0; i < n; ++i) {
    u_p.row(i) = u.row(perm[i]);
    for (int j = 0; j < n; ++j) yi_p(i, j) = yi(perm[i], perm[j]);
    for (int a = 0; a < m; ++a) ym_p(i, a) = ym(perm[i], a);
  }
  const double permuted = joint_log_likelihood(
      SocialNetwork(yi_p), AttributeMatrix(ym_p), LatentPositions{u_p, v}, icpt);
  CHECK(permuted == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("log-likelihood terms are monotone in theta") {
  // Single-edge graph: moving u_0 toward u_1 raises theta, so the y = 1
  // log-term must increase and the y = 0 log-term must decrease.
  BinaryMatrix edge(2, 2), no_edge(2, 2);
  edge << 0, 1, 1, 0;
  no_edge.setZero();
  Matrix u(2, 1);
  u << 0.0, 2.0;
  Matrix closer(2, 1);
  closer << 0.5, 2.0;

  const SocialNetwork with_edge(edge), without_edge(no_edge);
  CHECK(social_log_likelihood(with_edge, closer, 0.3) >
        social_log_likelihood(with_edge, u, 0.3));
  CHECK(social_log_likelihood(without_edge, closer, 0.3) <
        social_log_likelihood(without_edge, u, 0.3));
}

TEST_CASE("diagonal entries are accepted and ignored") {
  BinaryMatrix with_loops = path_graph3();
  with_loops(0, 0) = 1;
  with_loops(2, 2) = 1;
  const SocialNetwork a(with_loops);
  const SocialNetwork b(path_graph3());
  Matrix u = Matrix::Random(3, 2);
  CHECK(social_log_likelihood(a, u, 0.2) == social_log_likelihood(b, u, 0.2));
  CHECK(a.edge_total() == b.edge_total());
}

TEST_CASE("missing entries are dropped from sums") {
  BinaryMatrix yi = path_graph3();
  yi(0, 1) = kMissing;
  yi(1, 0) = kMissing;
  const SocialNetwork sn(yi);
  CHECK(sn.present_pairs() == 4);
  CHECK(sn.edge_total() == 2.0);

  BinaryMatrix full = path_graph3();
  // Dropping the (0,1) dyad must change the likelihood by exactly those terms.
  Matrix u(3, 1);
  u << 0.0, 1.0, 2.5;
  const double drop = social_log_likelihood(sn, u, 0.0);
  const double keep = social_log_likelihood(SocialNetwork(full), u, 0.0);
  const double pair_term = 2.0 * log_logistic(0.0 - 1.0);
  CHECK(keep - drop == doctest::Approx(pair_term).epsilon(1e-12));
}

TEST_CASE("validation errors") {
  BinaryMatrix bad(2, 2);
  bad << 0, 2, 1, 0;
  CHECK_THROWS_AS(SocialNetwork(bad), std::invalid_argument);

  BinaryMatrix asym(2, 2);
  asym << 0, 1, 0, 0;
  CHECK_THROWS_AS(SocialNetwork(asym, /*directed=*/false),
                  std::invalid_argument);
  CHECK_NOTHROW(SocialNetwork(asym, /*directed=*/true));

  BinaryMatrix rect(2, 3);
  rect.setZero();
  CHECK_THROWS_AS(SocialNetwork(rect), std::invalid_argument);

  CHECK_THROWS_AS(LatentConfig({2, 0.0, 1.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(LatentConfig({0, 1.0, 1.0}).validate(), std::invalid_argument);

  // Person-count mismatch between the matrices.
  BinaryMatrix yi(2, 2);
  yi.setZero();
  BinaryMatrix ym(3, 1);
  ym.setZero();
  LatentPositions pos{Matrix::Zero(2, 1), Matrix::Zero(1, 1)};
  CHECK_THROWS_AS(joint_log_likelihood(SocialNetwork(yi), AttributeMatrix(ym),
                                       pos, Intercepts{}),
                  std::invalid_argument);
}
