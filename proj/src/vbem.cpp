#include "aplsm/vbem.hpp"

#include "aplsm/core_model.hpp"
#include "aplsm/rng.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace aplsm {

namespace {

constexpr double kMonotonicitySlack = 1e-3;
constexpr double kAlphaStepClamp = 5.0;
constexpr double kTinyCurvature = 1e-12;
constexpr int kMaxHalvings = 5;
constexpr double kInterceptInitClamp = 5.0;
constexpr double kInitCov = 0.1;

double symmetric_min_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()));
  return es.eigenvalues().minCoeff();
}

void check_shapes(const VariationalState& state, const SocialNetwork* yi,
                  const AttributeMatrix* yia, const LatentConfig& config) {
  if (state.dim() != config.dim) {
    throw std::invalid_argument("state dimension does not match config");
  }
  if (yi && yi->n_persons() != state.n_persons()) {
    throw std::invalid_argument("social network size does not match state");
  }
  if (yia && (yia->n_persons() != state.n_persons() ||
              yia->n_attributes() != state.n_attributes())) {
    throw std::invalid_argument("attribute matrix size does not match state");
  }
  if (yi && yia && yi->n_persons() != yia->n_persons()) {
    throw std::invalid_argument("matrices disagree on person count");
  }
  if (!yi && !yia) {
    throw std::invalid_argument("at least one data matrix is required");
  }
}

/// Per-person sum_j (y_ij + y_ji) over present dyads.
Vector social_dyad_counts(const SocialNetwork& yi) {
  const int n = yi.n_persons();
  Vector counts = Vector::Zero(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (yi.present(i, j)) {
        counts(i) += yi.value(i, j);
        counts(j) += yi.value(i, j);
      }
    }
  return counts;
}

/// Per-person sum_j (y_ij + y_ji) u_j.
Matrix social_neighbor_sums(const SocialNetwork& yi, const Matrix& means) {
  const int n = yi.n_persons();
  Matrix sums = Matrix::Zero(n, means.cols());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (yi.present(i, j) && yi.value(i, j) > 0.5) {
        sums.row(i) += means.row(j);
        sums.row(j) += means.row(i);
      }
    }
  return sums;
}

Vector attribute_counts_by_person(const AttributeMatrix& yia) {
  Vector counts = Vector::Zero(yia.n_persons());
  for (int i = 0; i < yia.n_persons(); ++i)
    for (int a = 0; a < yia.n_attributes(); ++a)
      if (yia.present(i, a)) counts(i) += yia.value(i, a);
  return counts;
}

Vector attribute_counts_by_attribute(const AttributeMatrix& yia) {
  Vector counts = Vector::Zero(yia.n_attributes());
  for (int i = 0; i < yia.n_persons(); ++i)
    for (int a = 0; a < yia.n_attributes(); ++a)
      if (yia.present(i, a)) counts(a) += yia.value(i, a);
  return counts;
}

Matrix attribute_neighbor_sums_person(const AttributeMatrix& yia,
                                      const Matrix& attrs) {
  Matrix sums = Matrix::Zero(yia.n_persons(), attrs.cols());
  for (int i = 0; i < yia.n_persons(); ++i)
    for (int a = 0; a < yia.n_attributes(); ++a)
      if (yia.present(i, a) && yia.value(i, a) > 0.5) sums.row(i) += attrs.row(a);
  return sums;
}

Matrix attribute_neighbor_sums_attribute(const AttributeMatrix& yia,
                                         const Matrix& persons) {
  Matrix sums = Matrix::Zero(yia.n_attributes(), persons.cols());
  for (int i = 0; i < yia.n_persons(); ++i)
    for (int a = 0; a < yia.n_attributes(); ++a)
      if (yia.present(i, a) && yia.value(i, a) > 0.5)
        sums.row(a) += persons.row(i);
  return sums;
}

/// Symmetrized solve with escalating ridge repair. Returns false when even
/// the repaired system fails, in which case out is left untouched.
bool solve_bracket(Matrix bracket, const Vector& rhs, double ridge,
                   Vector* out) {
  bracket = 0.5 * (bracket + bracket.transpose());
  const int d = static_cast<int>(bracket.rows());
  double boost = 0.0;
  const double base = std::max(ridge, 1e-10);
  for (int attempt = 0; attempt < 3; ++attempt) {
    const Matrix m = bracket + boost * Matrix::Identity(d, d);
    Eigen::LDLT<Matrix> ldlt(m);
    if (ldlt.info() == Eigen::Success) {
      Vector x = ldlt.solve(rhs);
      const double scale = rhs.norm() + 1.0;
      if (x.allFinite() && (m * x - rhs).norm() <= 1e-6 * scale) {
        *out = x;
        return true;
      }
    }
    boost = (boost == 0.0) ? base : boost * 100.0;
  }
  return false;
}

/// Symmetrize, invert with ridge repair, floor eigenvalues.
Matrix inverse_floored(Matrix bracket, double scale_num, double ridge) {
  const int d = static_cast<int>(bracket.rows());
  bracket = 0.5 * (bracket + bracket.transpose());
  double boost = 0.0;
  const double base = std::max(ridge, 1e-10);
  Matrix inv;
  bool ok = false;
  for (int attempt = 0; attempt < 3 && !ok; ++attempt) {
    const Matrix m = bracket + boost * Matrix::Identity(d, d);
    Eigen::PartialPivLU<Matrix> lu(m);
    inv = lu.solve(Matrix::Identity(d, d));
    ok = inv.allFinite();
    boost = (boost == 0.0) ? base : boost * 100.0;
  }
  if (!ok) {
    throw std::runtime_error("covariance update: bracket is singular");
  }
  Matrix result = scale_num * inv;
  result = 0.5 * (result + result.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(result);
  const double floor = std::max(ridge, 1e-12);
  Vector ev = es.eigenvalues().cwiseMax(floor);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

double objective(const VariationalState& state, const SocialNetwork* yi,
                 const AttributeMatrix* yia, const LatentConfig& config) {
  return elbo_surrogate(state, yi, yia, config);
}

}  // namespace

void VariationalState::validate() const {
  if (!mean_persons.allFinite() || !mean_attributes.allFinite() ||
      !cov_persons.allFinite() || !cov_attributes.allFinite() ||
      !std::isfinite(alpha0) || !std::isfinite(alpha1)) {
    throw std::invalid_argument("VariationalState: non-finite entries");
  }
  if (cov_persons.rows() != cov_persons.cols() ||
      cov_attributes.rows() != cov_attributes.cols()) {
    throw std::invalid_argument("VariationalState: covariances must be square");
  }
  auto check_pd = [](const Matrix& c, const char* name) {
    if (!c.isApprox(c.transpose(), 1e-8)) {
      throw std::invalid_argument(std::string("VariationalState: ") + name +
                                  " is not symmetric");
    }
    if (symmetric_min_eigenvalue(c) <= 0.0) {
      throw std::invalid_argument(std::string("VariationalState: ") + name +
                                  " is not positive definite");
    }
  };
  check_pd(cov_persons, "cov_persons");
  if (mean_attributes.rows() > 0) check_pd(cov_attributes, "cov_attributes");
}

void FitOptions::validate() const {
  if (max_iterations < 1) {
    throw std::invalid_argument("FitOptions: max_iterations must be >= 1");
  }
  if (convergence_ratio >= 1.0) {
    throw std::invalid_argument("FitOptions: convergence_ratio must be < 1");
  }
  if (ridge < 0.0) {
    throw std::invalid_argument("FitOptions: ridge must be >= 0");
  }
  if (init_scale < 0.0) {
    throw std::invalid_argument("FitOptions: init_scale must be >= 0");
  }
}

double gaussian_expectation_exp_negdist(const Vector& mean_diff,
                                        const Matrix& cov_sum) {
  const int d = static_cast<int>(mean_diff.size());
  if (cov_sum.rows() != d || cov_sum.cols() != d) {
    throw std::invalid_argument(
        "gaussian_expectation_exp_negdist: dimension mismatch");
  }
  const Matrix sym = 0.5 * (cov_sum + cov_sum.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  const double scale = 1.0 + sym.cwiseAbs().maxCoeff();
  if (es.eigenvalues().minCoeff() < -1e-10 * scale) {
    throw std::invalid_argument(
        "gaussian_expectation_exp_negdist: cov_sum is not PSD");
  }
  const Matrix b = Matrix::Identity(d, d) + sym;
  Eigen::LLT<Matrix> llt(b);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument(
        "gaussian_expectation_exp_negdist: I + cov_sum is not PD");
  }
  double logdet = 0.0;
  for (int k = 0; k < d; ++k) logdet += 2.0 * std::log(llt.matrixL()(k, k));
  const double q = mean_diff.dot(llt.solve(mean_diff));
  return std::exp(-q - 0.5 * logdet);
}

double elbo_surrogate(const VariationalState& state, const SocialNetwork* yi,
                      const AttributeMatrix* yia, const LatentConfig& config) {
  config.validate();
  check_shapes(state, yi, yia, config);

  const int d = state.dim();
  const int n = state.n_persons();
  const int m = state.n_attributes();

  auto logdet_spd = [](const Matrix& c) {
    Eigen::LLT<Matrix> llt(c);
    if (llt.info() != Eigen::Success) {
      throw std::invalid_argument("elbo_surrogate: covariance not PD");
    }
    double value = 0.0;
    for (int k = 0; k < c.rows(); ++k)
      value += 2.0 * std::log(llt.matrixL()(k, k));
    return value;
  };

  // Negated Gaussian-prior KL terms.
  const double lam0 = config.prior_var_person;
  double obj = -0.5 * (d * n * std::log(lam0) - n * logdet_spd(state.cov_persons));
  obj -= n * state.cov_persons.trace() / (2.0 * lam0);
  obj -= state.mean_persons.squaredNorm() / (2.0 * lam0);
  obj += 0.5 * n * d;
  if (m > 0) {
    const double lam1 = config.prior_var_attribute;
    obj -= 0.5 * (d * m * std::log(lam1) - m * logdet_spd(state.cov_attributes));
    obj -= m * state.cov_attributes.trace() / (2.0 * lam1);
    obj -= state.mean_attributes.squaredNorm() / (2.0 * lam1);
    obj += 0.5 * m * d;
  }

  // Jensen lower bound on the expected data log-likelihood.
  if (yi) {
    const auto k = kernels::social_kernel(state);
    const auto bt = kernels::social_bound_parallel(state.mean_persons, k, *yi);
    obj += bt.bound_linear - bt.log_terms;
  }
  if (yia) {
    const auto k = kernels::bipartite_kernel(state);
    const auto bt = kernels::bipartite_bound_parallel(
        state.mean_persons, state.mean_attributes, k, *yia);
    obj += bt.bound_linear - bt.log_terms;
  }
  return obj;
}

GradientBundle objective_gradients(const VariationalState& state,
                                   const SocialNetwork* yi,
                                   const AttributeMatrix* yia,
                                   const LatentConfig& config) {
  check_shapes(state, yi, yia, config);
  GradientBundle bundle;
  if (yi) {
    bundle.has_social = true;
    bundle.social = kernels::social_sums_parallel(
        state.mean_persons, kernels::social_kernel(state), *yi);
  }
  if (yia) {
    bundle.has_bipartite = true;
    bundle.bipartite = kernels::bipartite_sums_parallel(
        state.mean_persons, state.mean_attributes,
        kernels::bipartite_kernel(state), *yia);
  }
  return bundle;
}

Matrix ve_update_persons(const VariationalState& state, const SocialNetwork* yi,
                         const AttributeMatrix* yia, const LatentConfig& config,
                         const FitOptions& options, const GradientBundle& bundle,
                         FitDiagnostics* diag) {
  const int n = state.n_persons();
  const int d = state.dim();
  const double prior = 1.0 / (2.0 * config.prior_var_person);

  Vector dyad_counts = Vector::Zero(n);
  Matrix social_sums = Matrix::Zero(n, d);
  if (yi) {
    dyad_counts = social_dyad_counts(*yi);
    social_sums = social_neighbor_sums(*yi, state.mean_persons);
  }
  Vector attr_counts = Vector::Zero(n);
  Matrix attr_sums = Matrix::Zero(n, d);
  if (yia) {
    attr_counts = attribute_counts_by_person(*yia);
    attr_sums = attribute_neighbor_sums_person(*yia, state.mean_attributes);
  }

  Matrix next(n, d);
  int fallbacks = 0;
#pragma omp parallel for schedule(static) reduction(+ : fallbacks)
  for (int i = 0; i < n; ++i) {
    Matrix bracket =
        (prior + dyad_counts(i) + attr_counts(i)) * Matrix::Identity(d, d);
    Vector rhs = social_sums.row(i) + attr_sums.row(i);
    const Vector current = state.mean_persons.row(i);
    if (bundle.has_social) {
      bracket += bundle.social.hess_means[i];
      rhs -= bundle.social.grad_means.row(i);
      rhs += bundle.social.hess_means[i] * current;
    }
    if (bundle.has_bipartite) {
      bracket += 0.5 * bundle.bipartite.hess_means_person[i];
      rhs -= 0.5 * bundle.bipartite.grad_means_person.row(i);
      rhs += 0.5 * (bundle.bipartite.hess_means_person[i] * current);
    }
    Vector solution(d);
    if (solve_bracket(bracket, rhs, options.ridge, &solution)) {
      next.row(i) = solution;
    } else {
      // Damped ascent step on the local quadratic model.
      const Vector step = rhs - bracket * current;
      const double scale = bracket.cwiseAbs().maxCoeff() + 1.0;
      next.row(i) = current + 0.1 * step / scale;
      ++fallbacks;
    }
  }
  if (diag) diag->gradient_fallbacks += fallbacks;
  return next;
}

Matrix ve_update_attributes(const VariationalState& state,
                            const AttributeMatrix* yia,
                            const LatentConfig& config, const FitOptions& options,
                            const GradientBundle& bundle, FitDiagnostics* diag) {
  if (!yia || !bundle.has_bipartite) {
    throw std::invalid_argument("ve_update_attributes: attribute data required");
  }
  const int m = state.n_attributes();
  const int d = state.dim();
  const double prior = 1.0 / (2.0 * config.prior_var_attribute);
  const Vector counts = attribute_counts_by_attribute(*yia);
  const Matrix person_sums =
      attribute_neighbor_sums_attribute(*yia, state.mean_persons);

  Matrix next(m, d);
  int fallbacks = 0;
#pragma omp parallel for schedule(static) reduction(+ : fallbacks)
  for (int a = 0; a < m; ++a) {
    const Matrix bracket = (prior + counts(a)) * Matrix::Identity(d, d) -
                           0.5 * bundle.bipartite.hess_means_attr[a];
    const Vector rhs =
        person_sums.row(a) - 0.5 * bundle.bipartite.grad_means_attr.row(a);
    Vector solution(d);
    if (solve_bracket(bracket, rhs, options.ridge, &solution)) {
      next.row(a) = solution;
    } else {
      const Vector current = state.mean_attributes.row(a);
      const Vector step = rhs - bracket * current;
      const double scale = bracket.cwiseAbs().maxCoeff() + 1.0;
      next.row(a) = current + 0.1 * step / scale;
      ++fallbacks;
    }
  }
  if (diag) diag->gradient_fallbacks += fallbacks;
  return next;
}

std::pair<Matrix, Matrix> ve_update_covariances(
    const VariationalState& state, const SocialNetwork* yi,
    const AttributeMatrix* yia, const LatentConfig& config,
    const FitOptions& options, const GradientBundle& bundle) {
  const int n = state.n_persons();
  const int m = state.n_attributes();
  const int d = state.dim();

  double scalar0 = 0.5 * n / config.prior_var_person;
  Matrix g0 = Matrix::Zero(d, d);
  if (yi && bundle.has_social) {
    scalar0 += 2.0 * yi->edge_total();
    g0 += bundle.social.grad_cov;
  }
  if (yia && bundle.has_bipartite) {
    scalar0 += yia->positive_total();
    g0 += bundle.bipartite.grad_cov0;
  }
  Matrix cov0 = inverse_floored(scalar0 * Matrix::Identity(d, d) + g0, 0.5 * n,
                                options.ridge);

  Matrix cov1 = state.cov_attributes;
  if (yia && bundle.has_bipartite && m > 0) {
    const double scalar1 =
        0.5 * m / config.prior_var_attribute + yia->positive_total();
    cov1 = inverse_floored(
        scalar1 * Matrix::Identity(d, d) + bundle.bipartite.grad_cov1, 0.5 * m,
        options.ridge);
  }
  return {cov0, cov1};
}

std::pair<double, double> m_update_intercepts(const VariationalState& state,
                                              const SocialNetwork* yi,
                                              const AttributeMatrix* yia,
                                              const GradientBundle& bundle,
                                              FitDiagnostics* diag) {
  double alpha0 = state.alpha0;
  double alpha1 = state.alpha1;
  if (yi && bundle.has_social) {
    const double h = bundle.social.hess_alpha;
    if (h > kTinyCurvature) {
      const double step = (yi->edge_total() - bundle.social.grad_alpha) / h;
      alpha0 += std::clamp(step, -kAlphaStepClamp, kAlphaStepClamp);
    } else if (diag) {
      ++diag->intercept_skips;
    }
  }
  if (yia && bundle.has_bipartite) {
    const double h = bundle.bipartite.hess_alpha;
    if (h > kTinyCurvature) {
      const double step =
          (yia->positive_total() - bundle.bipartite.grad_alpha) / h;
      alpha1 += std::clamp(step, -kAlphaStepClamp, kAlphaStepClamp);
    } else if (diag) {
      ++diag->intercept_skips;
    }
  }
  return {alpha0, alpha1};
}

VariationalState initial_state(ModelKind kind, const SocialNetwork* yi,
                               const AttributeMatrix* yia,
                               const LatentConfig& config,
                               const FitOptions& options) {
  config.validate();
  options.validate();
  const bool social = kind != ModelKind::blsm;
  const bool attrs = kind != ModelKind::lsm;
  if (social && !yi) throw std::invalid_argument("social network required");
  if (attrs && !yia) throw std::invalid_argument("attribute matrix required");

  const int n = social ? yi->n_persons() : yia->n_persons();
  const int m = attrs ? yia->n_attributes() : 0;
  const int d = config.dim;

  VariationalState state;
  Rng rng(options.seed);
  state.mean_persons = Matrix(n, d);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k)
      state.mean_persons(i, k) = options.init_scale * rng.normal();
  state.mean_attributes = Matrix(m, d);
  for (int a = 0; a < m; ++a)
    for (int k = 0; k < d; ++k)
      state.mean_attributes(a, k) = options.init_scale * rng.normal();
  state.cov_persons = kInitCov * Matrix::Identity(d, d);
  state.cov_attributes = kInitCov * Matrix::Identity(d, d);

  // Density-matched intercepts avoid early gradient saturation.
  auto clamped_logit = [](double density) {
    if (!std::isfinite(density)) return 0.0;
    return std::clamp(logit(density), -kInterceptInitClamp,
                      kInterceptInitClamp);
  };
  state.alpha0 = social ? clamped_logit(yi->density()) : 0.0;
  state.alpha1 = attrs ? clamped_logit(yia->density()) : 0.0;
  return state;
}

namespace {

FitResult fit_impl(ModelKind kind, const SocialNetwork* yi,
                   const AttributeMatrix* yia, const LatentConfig& config,
                   const FitOptions& options, const VariationalState* init) {
  config.validate();
  options.validate();

  FitResult result;
  result.model_kind = kind;
  VariationalState state =
      init ? *init : initial_state(kind, yi, yia, config, options);
  if (init) state.validate();
  check_shapes(state, yi, yia, config);
  const bool attrs = yia != nullptr;

  double obj_prev = objective(state, yi, yia, config);
  if (!std::isfinite(obj_prev)) {
    throw std::runtime_error("fit: initial objective is not finite");
  }
  result.objective_trace.reserve(options.max_iterations);

  for (int t = 1; t <= options.max_iterations; ++t) {
    // M-step, then covariances, then means, each at the freshest values.
    GradientBundle bundle = objective_gradients(state, yi, yia, config);
    const auto [a0, a1] =
        m_update_intercepts(state, yi, yia, bundle, &result.diagnostics);
    state.alpha0 = a0;
    state.alpha1 = a1;

    bundle = objective_gradients(state, yi, yia, config);
    const auto [cov0, cov1] =
        ve_update_covariances(state, yi, yia, config, options, bundle);
    state.cov_persons = cov0;
    if (attrs) state.cov_attributes = cov1;

    bundle = objective_gradients(state, yi, yia, config);
    const Matrix old_u = state.mean_persons;
    const Matrix old_v = state.mean_attributes;
    const Matrix prop_u = ve_update_persons(state, yi, yia, config, options,
                                            bundle, &result.diagnostics);
    const Matrix prop_v =
        attrs ? ve_update_attributes(state, yia, config, options, bundle,
                                     &result.diagnostics)
              : old_v;
    const double obj_ref = objective(state, yi, yia, config);

    state.mean_persons = prop_u;
    if (attrs) state.mean_attributes = prop_v;
    double obj_new = objective(state, yi, yia, config);

    // The Taylor step carries no guarantee; halve it while it hurts.
    if (obj_new < obj_ref - kMonotonicitySlack) {
      double best_obj = obj_new;
      Matrix best_u = prop_u, best_v = prop_v;
      double scale = 1.0;
      for (int h = 0; h < kMaxHalvings && obj_new < obj_ref - kMonotonicitySlack;
           ++h) {
        scale *= 0.5;
        state.mean_persons = old_u + scale * (prop_u - old_u);
        if (attrs) state.mean_attributes = old_v + scale * (prop_v - old_v);
        obj_new = objective(state, yi, yia, config);
        if (obj_new > best_obj) {
          best_obj = obj_new;
          best_u = state.mean_persons;
          best_v = state.mean_attributes;
        }
      }
      if (obj_new < best_obj) {
        state.mean_persons = best_u;
        if (attrs) state.mean_attributes = best_v;
        obj_new = best_obj;
      }
      ++result.diagnostics.damped_sweeps;
    }

    if (!std::isfinite(obj_new)) {
      throw std::runtime_error("fit: objective became non-finite at iteration " +
                               std::to_string(t));
    }
    result.objective_trace.push_back(obj_new);
    result.iterations_run = t;

    bool converged = std::abs(obj_new - obj_prev) <= options.abs_tolerance;
    if (!converged && std::abs(obj_prev) > 0.0) {
      const double ratio = obj_new / obj_prev;
      converged = std::abs(ratio - 1.0) <= 1.0 - options.convergence_ratio;
    }
    obj_prev = obj_new;
    if (converged) {
      result.converged = true;
      break;
    }
  }

  result.state = std::move(state);
  return result;
}

}  // namespace

FitResult fit_aplsm(const SocialNetwork& yi, const AttributeMatrix& yia,
                    const LatentConfig& config, const FitOptions& options,
                    const VariationalState* init) {
  return fit_impl(ModelKind::aplsm, &yi, &yia, config, options, init);
}

FitResult fit_blsm(const AttributeMatrix& yia, const LatentConfig& config,
                   const FitOptions& options, const VariationalState* init) {
  return fit_impl(ModelKind::blsm, nullptr, &yia, config, options, init);
}

FitResult fit_lsm(const SocialNetwork& yi, const LatentConfig& config,
                  const FitOptions& options, const VariationalState* init) {
  return fit_impl(ModelKind::lsm, &yi, nullptr, config, options, init);
}

LinkProbabilities posterior_link_probabilities(const FitResult& result) {
  const VariationalState& state = result.state;
  LinkProbabilities probs;
  const int n = state.n_persons();
  const int m = state.n_attributes();

  if (result.model_kind != ModelKind::blsm) {
    probs.social = Matrix::Constant(n, n,
                                    std::numeric_limits<double>::quiet_NaN());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const double theta =
            state.alpha0 -
            (state.mean_persons.row(i) - state.mean_persons.row(j))
                .squaredNorm();
        probs.social(i, j) = logistic(theta);
      }
  }
  if (result.model_kind != ModelKind::lsm) {
    probs.attribute = Matrix(n, m);
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < m; ++a) {
        const double theta =
            state.alpha1 -
            (state.mean_persons.row(i) - state.mean_attributes.row(a))
                .squaredNorm();
        probs.attribute(i, a) = logistic(theta);
      }
  }
  return probs;
}

}  // namespace aplsm
