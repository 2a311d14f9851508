#pragma once

#include <cstdint>

#include "prgamp/types.hpp"

namespace prgamp {

enum class FieldKind { complex_field, real_field };

// Bernoulli-Gaussian signal prior: x = 0 with prob 1-lambda, else a zero-mean
// Gaussian of variance phi (circular complex, or real on the real line).
struct BernoulliGaussianPrior {
  FieldKind field = FieldKind::complex_field;
  double lambda = 0.1;
  double phi = 1.0;
};

// Posterior of one coefficient under the pseudo-measurement r_hat ~ x + noise
// of circular variance nu_r.  For the real field the measurement restricts to
// the real line: real part of r_hat with real variance nu_r/2.
struct XPosterior {
  cd mean;
  double var;
  double activity;  // posterior probability the coefficient is active
};

XPosterior bg_posterior(const BernoulliGaussianPrior& prior, cd r_hat, double nu_r);

cvec draw_prior_sample(const BernoulliGaussianPrior& prior, std::size_t n,
                       std::uint64_t seed);

// active-component variance from the measured energy:
// (||y||^2 - M nu_w) / (lambda ||A||_F^2), floored at 1e-12
double estimate_phi(const dvec& y, double nu_w, double lambda, double frobenius_sq);

}  // namespace prgamp
