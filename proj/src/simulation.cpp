#include "aplsm/simulation.hpp"

#include "aplsm/core_model.hpp"
#include "aplsm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace aplsm {

namespace {

double quantile(std::vector<double> values, double p) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double pos = p * (static_cast<double>(values.size()) - 1.0);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

double worst_trace_dip(const std::vector<double>& trace) {
  double dip = 0.0;
  for (std::size_t t = 1; t < trace.size(); ++t) {
    dip = std::max(dip, trace[t - 1] - trace[t]);
  }
  return dip;
}

}  // namespace

void SimulationSpec::validate() const {
  if (n_persons < 1 || n_attributes < 1) {
    throw std::invalid_argument("SimulationSpec: counts must be >= 1");
  }
  if (dim < 1) throw std::invalid_argument("SimulationSpec: dim must be >= 1");
  if (!(prior_var_person > 0.0) || !(prior_var_attribute > 0.0)) {
    throw std::invalid_argument("SimulationSpec: variances must be > 0");
  }
  if (n_replications < 1) {
    throw std::invalid_argument("SimulationSpec: n_replications must be >= 1");
  }
  if (!std::isfinite(alpha0) || !std::isfinite(alpha1)) {
    throw std::invalid_argument("SimulationSpec: intercepts must be finite");
  }
}

LatentConfig SimulationSpec::latent_config() const {
  return {dim, prior_var_person, prior_var_attribute};
}

LatentPositions sample_latent_positions(const SimulationSpec& spec, Rng& rng) {
  spec.validate();
  LatentPositions pos;
  const double sd0 = std::sqrt(spec.prior_var_person);
  const double sd1 = std::sqrt(spec.prior_var_attribute);
  pos.persons = Matrix(spec.n_persons, spec.dim);
  for (int i = 0; i < spec.n_persons; ++i)
    for (int d = 0; d < spec.dim; ++d) pos.persons(i, d) = sd0 * rng.normal();
  pos.attributes = Matrix(spec.n_attributes, spec.dim);
  for (int a = 0; a < spec.n_attributes; ++a)
    for (int d = 0; d < spec.dim; ++d)
      pos.attributes(a, d) = sd1 * rng.normal();
  return pos;
}

SimulationReplicate generate_replicate(const SimulationSpec& spec,
                                       int replicate_index) {
  spec.validate();
  Rng rng = Rng::for_stream(spec.seed, static_cast<std::uint64_t>(replicate_index));
  const LatentPositions pos = sample_latent_positions(spec, rng);
  const int n = spec.n_persons;
  const int m = spec.n_attributes;

  Matrix prob_social =
      Matrix::Constant(n, n, std::numeric_limits<double>::quiet_NaN());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double theta =
          spec.alpha0 - (pos.persons.row(i) - pos.persons.row(j)).squaredNorm();
      prob_social(i, j) = logistic(theta);
    }

  BinaryMatrix yi = BinaryMatrix::Zero(n, n);
  if (spec.directed) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) yi(i, j) = rng.bernoulli(prob_social(i, j)) ? 1 : 0;
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const std::int8_t v = rng.bernoulli(prob_social(i, j)) ? 1 : 0;
        yi(i, j) = v;
        yi(j, i) = v;
      }
  }

  Matrix prob_attr(n, m);
  BinaryMatrix yia = BinaryMatrix::Zero(n, m);
  Eigen::MatrixXi counts;
  const bool count_family = spec.link_family != LinkFamily::bernoulli_logistic;
  if (count_family) counts = Eigen::MatrixXi::Zero(n, m);
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < m; ++a) {
      const double theta =
          spec.alpha1 -
          (pos.persons.row(i) - pos.attributes.row(a)).squaredNorm();
      const LinkValue link = link_probability(theta, spec.link_family);
      prob_attr(i, a) = link.primary;
      switch (spec.link_family) {
        case LinkFamily::bernoulli_logistic:
          yia(i, a) = rng.bernoulli(link.primary) ? 1 : 0;
          break;
        case LinkFamily::poisson_log: {
          const int c = rng.poisson(link.primary);
          counts(i, a) = c;
          yia(i, a) = c > 0 ? 1 : 0;
          break;
        }
        case LinkFamily::zero_inflated_poisson: {
          int c = 0;
          if (rng.bernoulli(link.primary)) c = rng.poisson(link.rate);
          counts(i, a) = c;
          yia(i, a) = c > 0 ? 1 : 0;
          break;
        }
      }
    }
  }

  return SimulationReplicate{
      pos,
      std::move(prob_social),
      std::move(prob_attr),
      SocialNetwork(std::move(yi), spec.directed),
      AttributeMatrix(std::move(yia)),
      std::move(counts),
      spec.seed ^ static_cast<std::uint64_t>(replicate_index)};
}

ReplicationResult run_replication_study(const SimulationSpec& spec,
                                        const FitOptions& fit_options) {
  spec.validate();
  fit_options.validate();
  if (spec.link_family != LinkFamily::bernoulli_logistic) {
    throw std::invalid_argument(
        "run_replication_study: estimators support the Bernoulli family only");
  }

  ReplicationResult result;
  result.spec = spec;
  result.rows.resize(spec.n_replications);

#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < spec.n_replications; ++r) {
    ReplicateMetrics row;
    row.replicate_index = r;
    try {
      const SimulationReplicate rep = generate_replicate(spec, r);
      const LatentConfig config = spec.latent_config();
      FitOptions options = fit_options;

      options.seed = Rng::for_stream(spec.seed, 1000003ULL + r).next();
      const FitResult ap = fit_aplsm(rep.sampled_yi, rep.sampled_yia, config,
                                     options);
      options.seed = Rng::for_stream(spec.seed, 2000003ULL + r).next();
      const FitResult ls = fit_lsm(rep.sampled_yi, config, options);
      options.seed = Rng::for_stream(spec.seed, 3000003ULL + r).next();
      const FitResult bl = fit_blsm(rep.sampled_yia, config, options);

      const LinkProbabilities ap_probs = posterior_link_probabilities(ap);
      const LinkProbabilities ls_probs = posterior_link_probabilities(ls);
      const LinkProbabilities bl_probs = posterior_link_probabilities(bl);

      row.aae_social_aplsm =
          average_absolute_error(ap_probs.social, rep.true_prob_social, true);
      row.aae_social_lsm =
          average_absolute_error(ls_probs.social, rep.true_prob_social, true);
      row.aae_attr_aplsm =
          average_absolute_error(ap_probs.attribute, rep.true_prob_attr);
      row.aae_attr_blsm =
          average_absolute_error(bl_probs.attribute, rep.true_prob_attr);
      row.alpha0_error = ap.state.alpha0 - spec.alpha0;
      row.alpha1_error = ap.state.alpha1 - spec.alpha1;

      const auto person_ratios = pairwise_distance_ratios(
          ap.state.mean_persons, rep.true_positions.persons);
      const auto attr_ratios = pairwise_distance_ratios(
          ap.state.mean_attributes, rep.true_positions.attributes);
      row.ratio_person_quantiles = {quantile(person_ratios, 0.25),
                                    quantile(person_ratios, 0.5),
                                    quantile(person_ratios, 0.75)};
      row.ratio_attr_quantiles = {quantile(attr_ratios, 0.25),
                                  quantile(attr_ratios, 0.5),
                                  quantile(attr_ratios, 0.75)};

      row.all_converged = ap.converged && ls.converged && bl.converged;
      row.max_trace_dip = std::max({worst_trace_dip(ap.objective_trace),
                                    worst_trace_dip(ls.objective_trace),
                                    worst_trace_dip(bl.objective_trace)});
      row.valid = true;
    } catch (const std::exception&) {
      row.valid = false;
    }
    result.rows[r] = std::move(row);
  }
  return result;
}

}  // namespace aplsm
