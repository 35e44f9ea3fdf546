#pragma once

#include "aplsm/kernels.hpp"
#include "aplsm/state.hpp"
#include "aplsm/types.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace aplsm {

struct FitOptions {
  int max_iterations = 500;
  double convergence_ratio = 0.999999;
  double abs_tolerance = 1e-6;
  double ridge = 1e-6;
  std::uint64_t seed = 0;
  double init_scale = 0.1;

  void validate() const;
};

struct FitDiagnostics {
  int damped_sweeps = 0;       // mean sweeps that needed step halving
  int gradient_fallbacks = 0;  // singular brackets resolved by a damped step
  int intercept_skips = 0;     // intercept updates skipped (vanishing curvature)
};

struct FitResult {
  VariationalState state;
  std::vector<double> objective_trace;  // surrogate objective per iteration
  int iterations_run = 0;
  bool converged = false;
  ModelKind model_kind = ModelKind::aplsm;
  FitDiagnostics diagnostics;
};

/// E[exp(-|X|^2)] for X ~ N(mean_diff, cov_sum / 2):
/// exp(-m' (I + C)^-1 m) * det(I + C)^(-1/2). cov_sum is 4*cov0 for
/// person-person terms and 2*cov0 + 2*cov1 for person-attribute terms.
/// Throws when cov_sum is not positive semidefinite.
double gaussian_expectation_exp_negdist(const Vector& mean_diff,
                                        const Matrix& cov_sum);

/// The Jensen-bounded surrogate objective: Gaussian-prior KL terms plus the
/// lower bound on the expected data log-likelihood. Pass null for the side a
/// model does not use (lsm: social only; blsm: attributes only).
double elbo_surrogate(const VariationalState& state, const SocialNetwork* yi,
                      const AttributeMatrix* yia, const LatentConfig& config);

/// All closed-form derivative pieces the updates consume, exposed for
/// finite-difference testing. Sides without data are left empty.
struct GradientBundle {
  bool has_social = false;
  bool has_bipartite = false;
  kernels::SocialSums social;
  kernels::BipartiteSums bipartite;
};

GradientBundle objective_gradients(const VariationalState& state,
                                   const SocialNetwork* yi,
                                   const AttributeMatrix* yia,
                                   const LatentConfig& config);

/// Jacobi sweep over person means: every row solved from iteration-t values.
Matrix ve_update_persons(const VariationalState& state, const SocialNetwork* yi,
                         const AttributeMatrix* yia, const LatentConfig& config,
                         const FitOptions& options, const GradientBundle& bundle,
                         FitDiagnostics* diag = nullptr);

/// Attribute means, bracket and right side exactly as printed
/// ((1/(2*lambda1^2) + sum_i y_ia) I - H/2, no H*v term on the right).
Matrix ve_update_attributes(const VariationalState& state,
                            const AttributeMatrix* yia,
                            const LatentConfig& config, const FitOptions& options,
                            const GradientBundle& bundle,
                            FitDiagnostics* diag = nullptr);

/// Shared covariances; results are symmetrized and eigenvalue-floored at
/// options.ridge so they stay positive definite.
std::pair<Matrix, Matrix> ve_update_covariances(
    const VariationalState& state, const SocialNetwork* yi,
    const AttributeMatrix* yia, const LatentConfig& config,
    const FitOptions& options, const GradientBundle& bundle);

/// Newton-style intercept updates alpha + (sum y - g) / h, step clamped to
/// |delta| <= 5; an update with h below tiny is skipped and flagged.
std::pair<double, double> m_update_intercepts(const VariationalState& state,
                                              const SocialNetwork* yi,
                                              const AttributeMatrix* yia,
                                              const GradientBundle& bundle,
                                              FitDiagnostics* diag = nullptr);

/// Deterministic seeded initialization: means ~ N(0, init_scale^2 I),
/// covariances 0.1 I, intercepts at the clamped logit of each density.
VariationalState initial_state(ModelKind kind, const SocialNetwork* yi,
                               const AttributeMatrix* yia,
                               const LatentConfig& config,
                               const FitOptions& options);

FitResult fit_aplsm(const SocialNetwork& yi, const AttributeMatrix& yia,
                    const LatentConfig& config, const FitOptions& options,
                    const VariationalState* init = nullptr);
FitResult fit_blsm(const AttributeMatrix& yia, const LatentConfig& config,
                   const FitOptions& options,
                   const VariationalState* init = nullptr);
FitResult fit_lsm(const SocialNetwork& yi, const LatentConfig& config,
                  const FitOptions& options,
                  const VariationalState* init = nullptr);

/// Plug-in link probabilities at the posterior means. The social diagonal is
/// NaN (undefined); matrices not covered by the model are size zero.
struct LinkProbabilities {
  Matrix social;     // N x N
  Matrix attribute;  // N x M
};

LinkProbabilities posterior_link_probabilities(const FitResult& result);

}  // namespace aplsm
