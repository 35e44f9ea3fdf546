#pragma once

#include "aplsm/types.hpp"

namespace aplsm {

/// Variational parameters: per-node Gaussian means with one shared covariance
/// per side, plus the intercepts. cov_persons and cov_attributes must stay
/// symmetric positive definite.
struct VariationalState {
  Matrix mean_persons;     // N x D
  Matrix mean_attributes;  // M x D (0 x D when the model has no attribute side)
  Matrix cov_persons;      // D x D
  Matrix cov_attributes;   // D x D
  double alpha0 = 0.0;
  double alpha1 = 0.0;

  int dim() const { return static_cast<int>(cov_persons.rows()); }
  int n_persons() const { return static_cast<int>(mean_persons.rows()); }
  int n_attributes() const { return static_cast<int>(mean_attributes.rows()); }

  /// Throws unless covariances are symmetric PD and all entries finite.
  void validate() const;
};

}  // namespace aplsm
