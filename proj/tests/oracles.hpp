#pragma once

// Independent quadrature oracles for the scalar channel and prior posteriors.
// These integrate the defining densities directly; they share only the scaled
// Bessel primitives with the library (the Rician likelihood contains I0 by
// definition), never the closed-form posterior algebra.

#include <cmath>
#include <functional>
#include <stdexcept>

#include "prgamp/bessel.hpp"
#include "prgamp/priors.hpp"
#include "prgamp/types.hpp"

namespace testutil {

using prgamp::cd;

struct ScalarPosteriorRef {
  cd mean;
  double var;
  double log_scale;
};

// Radial integration of the magnitude-channel posterior:
//   C    = int L(r) (2r/nu_p) exp(-(r-|p|)^2/nu_p) i0e(2 r |p|/nu_p) dr
//   mom1 = int L(r) (2r^2/nu_p) ...       i1e(...) dr   (direction e^{j psi})
//   mom2 = int L(r) (2r^3/nu_p) ...       i0e(...) dr
// with the exact Rician likelihood L(r) = (2y/nu_w) exp(-(y-r)^2/nu_w) i0e(2yr/nu_w).
// The integrand is localized around the precision-weighted radius, so the
// domain is chosen there and refined until three integrals stabilize.
inline ScalarPosteriorRef rician_radial_oracle(double nu_w, double y, cd p_hat,
                                               double nu_p) {
  if (!(y > 0.0)) throw std::invalid_argument("radial oracle expects y > 0");
  const double ap = std::abs(p_hat);
  const double prec = 1.0 / nu_w + 1.0 / nu_p;
  const double center = (y / nu_w + ap / nu_p) / prec;
  const double sigma = std::sqrt(1.0 / prec);
  const double lo = std::max(0.0, center - 15.0 * sigma);
  const double hi = center + 15.0 * sigma;

  auto pass = [&](std::size_t pts, double& c, double& m1, double& m2) {
    const double h = (hi - lo) / double(pts);
    c = m1 = m2 = 0.0;
    for (std::size_t i = 0; i <= pts; ++i) {
      const double r = lo + i * h;
      const double w = (i == 0 || i == pts) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      const double dl = y - r, dp = r - ap;
      const double lik = (2.0 * y / nu_w) * std::exp(-dl * dl / nu_w) *
                         prgamp::i0_scaled(2.0 * y * r / nu_w);
      const double pri = std::exp(-dp * dp / nu_p);
      const double tau = 2.0 * r * ap / nu_p;
      c += w * lik * (2.0 * r / nu_p) * pri * prgamp::i0_scaled(tau);
      m1 += w * lik * (2.0 * r * r / nu_p) * pri * prgamp::i1_scaled(tau);
      m2 += w * lik * (2.0 * r * r * r / nu_p) * pri * prgamp::i0_scaled(tau);
    }
    c *= h / 3.0;
    m1 *= h / 3.0;
    m2 *= h / 3.0;
  };

  double c0, m10, m20;
  std::size_t pts = 1024;
  pass(pts, c0, m10, m20);
  for (;;) {
    if (pts > (1u << 20)) throw std::runtime_error("radial oracle did not stabilize");
    pts *= 2;
    double c1, m11, m21;
    pass(pts, c1, m11, m21);
    const auto ok = [](double a, double b) {
      return std::fabs(a - b) <= 1e-9 * std::max({std::fabs(a), std::fabs(b), 1e-300});
    };
    const bool stable = ok(c0, c1) && ok(m10, m11) && ok(m20, m21);
    c0 = c1;
    m10 = m11;
    m20 = m21;
    if (stable) break;
  }

  const cd dir = ap > 0.0 ? p_hat / ap : cd(1.0, 0.0);
  ScalarPosteriorRef ref;
  ref.mean = (m10 / c0) * dir;
  ref.var = m20 / c0 - std::norm(ref.mean);
  ref.log_scale = std::log(c0);
  return ref;
}

// Direct 2-D Cartesian integration of likelihood(z) * CN(z; p_hat, nu_p)
// over a box; the likelihood is an arbitrary callable.
inline ScalarPosteriorRef cartesian_2d_oracle(const std::function<double(cd)>& likelihood,
                                              cd p_hat, double nu_p, double box_radius,
                                              std::size_t pts_per_axis) {
  const double cx = std::real(p_hat), cy = std::imag(p_hat);
  const double lo_x = cx - box_radius, lo_y = cy - box_radius;
  const double h = 2.0 * box_radius / double(pts_per_axis);
  double c = 0.0, m2 = 0.0;
  cd m1{};
  for (std::size_t i = 0; i <= pts_per_axis; ++i) {
    const double wx = (i == 0 || i == pts_per_axis) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    const double zx = lo_x + i * h;
    for (std::size_t j = 0; j <= pts_per_axis; ++j) {
      const double wy = (j == 0 || j == pts_per_axis) ? 1.0 : (j % 2 ? 4.0 : 2.0);
      const cd z(zx, lo_y + j * h);
      const double g = std::exp(-std::norm(z - p_hat) / nu_p) / (M_PI * nu_p);
      const double f = likelihood(z) * g * wx * wy;
      c += f;
      m1 += f * z;
      m2 += f * std::norm(z);
    }
  }
  const double scale = h * h / 9.0;
  c *= scale;
  m1 *= scale;
  m2 *= scale;
  ScalarPosteriorRef ref;
  ref.mean = m1 / c;
  ref.var = m2 / c - std::norm(ref.mean);
  ref.log_scale = std::log(c);
  return ref;
}

struct PriorPosteriorRef {
  cd mean;
  double var;
  double activity;
};

// Bernoulli-Gaussian posterior by direct integration: the point mass at zero
// is handled exactly, the Gaussian branch on a grid.
inline PriorPosteriorRef bg_oracle(const prgamp::BernoulliGaussianPrior& prior, cd r_hat,
                                   double nu_r, std::size_t pts_per_axis = 768) {
  const double lambda = prior.lambda, phi = prior.phi;
  const double w_off = (1.0 - lambda) * std::exp(-std::norm(r_hat) / nu_r) / (M_PI * nu_r);

  double on = 0.0, m2 = 0.0;
  cd m1{};
  if (prior.field == prgamp::FieldKind::complex_field) {
    const double span = std::abs(r_hat) + 8.0 * std::max(std::sqrt(phi), std::sqrt(nu_r));
    const double h = 2.0 * span / double(pts_per_axis);
    for (std::size_t i = 0; i <= pts_per_axis; ++i) {
      const double wx = (i == 0 || i == pts_per_axis) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      const double zx = -span + i * h;
      for (std::size_t j = 0; j <= pts_per_axis; ++j) {
        const double wy = (j == 0 || j == pts_per_axis) ? 1.0 : (j % 2 ? 4.0 : 2.0);
        const cd x(zx, -span + j * h);
        const double f = wx * wy * lambda * std::exp(-std::norm(x) / phi) / (M_PI * phi) *
                         std::exp(-std::norm(x - r_hat) / nu_r) / (M_PI * nu_r);
        on += f;
        m1 += f * x;
        m2 += f * std::norm(x);
      }
    }
    const double scale = h * h / 9.0;
    on *= scale;
    m1 *= scale;
    m2 *= scale;
  } else {
    // real coefficient observed through the circular pseudo-measurement;
    // the density of r_hat given real x carries exp(-(x-Re r)^2/nu_r) and a
    // constant exp(-(Im r)^2/nu_r) factor, kept so the off/on weights match
    const double a = std::real(r_hat);
    const double span_lo = std::min(0.0, a) - 8.0 * std::max(std::sqrt(phi), std::sqrt(nu_r));
    const double span_hi = std::max(0.0, a) + 8.0 * std::max(std::sqrt(phi), std::sqrt(nu_r));
    const double h = (span_hi - span_lo) / double(pts_per_axis);
    for (std::size_t i = 0; i <= pts_per_axis; ++i) {
      const double w = (i == 0 || i == pts_per_axis) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      const double x = span_lo + i * h;
      const double f = w * lambda * std::exp(-0.5 * x * x / phi) / std::sqrt(2.0 * M_PI * phi) *
                       std::exp(-std::norm(cd(x, 0.0) - r_hat) / nu_r) / (M_PI * nu_r);
      on += f;
      m1 += f * x;
      m2 += f * x * x;
    }
    on *= h / 3.0;
    m1 *= h / 3.0;
    m2 *= h / 3.0;
  }

  const double z = w_off + on;
  PriorPosteriorRef ref;
  ref.mean = m1 / z;
  ref.var = m2 / z - std::norm(ref.mean);
  ref.activity = on / z;
  return ref;
}

}  // namespace testutil
