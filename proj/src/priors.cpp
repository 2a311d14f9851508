#include "prgamp/priors.hpp"

#include <cmath>
#include <stdexcept>

#include "prgamp/rng.hpp"

namespace prgamp {

namespace {

void check_prior(const BernoulliGaussianPrior& prior) {
  if (!(prior.lambda >= 0.0 && prior.lambda <= 1.0))
    throw std::invalid_argument("prior: lambda must be in [0,1]");
  if (!(prior.phi > 0.0)) throw std::invalid_argument("prior: phi must be positive");
}

double logistic(double l) {
  if (l >= 0.0) return 1.0 / (1.0 + std::exp(-l));
  const double e = std::exp(l);
  return e / (1.0 + e);
}

}  // namespace

XPosterior bg_posterior(const BernoulliGaussianPrior& prior, cd r_hat, double nu_r) {
  check_prior(prior);
  if (!(nu_r > 0.0)) throw std::invalid_argument("bg_posterior: nu_r must be positive");

  // The real field sees the restriction of the circular pseudo-measurement to
  // the real line: real observation Re(r_hat), real variance nu_r/2.  The
  // shared Im(r_hat) factor cancels from the activity odds.
  const bool real_field = prior.field == FieldKind::real_field;
  const double v = real_field ? 0.5 * nu_r : nu_r;
  const double energy = real_field ? std::real(r_hat) * std::real(r_hat) : std::norm(r_hat);
  const double phi = prior.phi;

  const double shrink = phi / (phi + v);
  const cd mu = real_field ? cd(std::real(r_hat) * shrink, 0.0) : r_hat * shrink;
  const double gamma = v * shrink;

  double activity;
  if (prior.lambda <= 0.0) {
    activity = 0.0;
  } else if (prior.lambda >= 1.0) {
    activity = 1.0;
  } else {
    // log of [lambda N(r;0,phi+v)] / [(1-lambda) N(r;0,v)], Gaussians of the
    // matching field; the 1/pi or 1/sqrt(2 pi) factors cancel
    const double half = real_field ? 0.5 : 1.0;
    const double log_odds = std::log(prior.lambda / (1.0 - prior.lambda)) +
                            half * (std::log(v / (phi + v)) +
                                    energy * (1.0 / v - 1.0 / (phi + v)));
    activity = logistic(log_odds);
  }

  XPosterior post;
  post.mean = activity * mu;
  post.var = activity * gamma + activity * (1.0 - activity) * std::norm(mu);
  post.activity = activity;
  return post;
}

cvec draw_prior_sample(const BernoulliGaussianPrior& prior, std::size_t n,
                       std::uint64_t seed) {
  check_prior(prior);
  Rng rng(seed);
  const double scale = std::sqrt(prior.phi);
  cvec x(n, cd{});
  for (std::size_t i = 0; i < n; ++i) {
    if (rng.uniform() < prior.lambda) {
      x[i] = prior.field == FieldKind::real_field ? cd(scale * rng.gaussian(), 0.0)
                                                  : scale * rng.cgaussian();
    }
  }
  return x;
}

double estimate_phi(const dvec& y, double nu_w, double lambda, double frobenius_sq) {
  if (!(lambda > 0.0)) throw std::invalid_argument("estimate_phi: lambda must be positive");
  if (!(frobenius_sq > 0.0))
    throw std::invalid_argument("estimate_phi: frobenius_sq must be positive");
  double energy = 0.0;
  for (double v : y) energy += v * v;
  const double phi = (energy - double(y.size()) * nu_w) / (lambda * frobenius_sq);
  return std::max(phi, 1e-12);
}

}  // namespace prgamp
