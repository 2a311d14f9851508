#include "prgamp/channels.hpp"

#include <cmath>
#include <stdexcept>

#include "prgamp/bessel.hpp"

namespace prgamp {

namespace {

void check_vars(double nu_w, double nu_p) {
  if (!(nu_w > 0.0)) throw std::invalid_argument("channel: nu_w must be positive");
  if (!(nu_p > 0.0)) throw std::invalid_argument("channel: nu_p must be positive");
}

cd unit_phase(cd p_hat, double abs_p) {
  if (abs_p == 0.0) return cd(1.0, 0.0);
  return p_hat / abs_p;
}

}  // namespace

double rician_log_scale(double nu_w, double y, double abs_p_hat, double nu_p) {
  const double s = nu_w + nu_p;
  const double d = y - abs_p_hat;
  if (y == 0.0) {
    // Jacobian-free limit: density of the measurement magnitude collapses,
    // leaving exp(-|z|^2/nu_w) integrated against the pseudo-prior
    return std::log(2.0 / s) - abs_p_hat * abs_p_hat / s;
  }
  const double rho = 2.0 * y * abs_p_hat / s;
  return std::log(2.0 * y / s) - d * d / s + log_i0_scaled(rho);
}

ZPosterior rician_posterior(double nu_w, double y, cd p_hat, double nu_p) {
  check_vars(nu_w, nu_p);
  if (!(y >= 0.0)) throw std::invalid_argument("rician_posterior: y must be >= 0");

  const double abs_p = std::abs(p_hat);
  const double s = nu_w + nu_p;
  const double rho = 2.0 * y * abs_p / s;
  const double a = y * nu_p / s;   // coefficient of the ratio term
  const double b = abs_p * nu_w / s;
  const double r0 = bessel_ratio_r0(rho);
  const double delta = bessel_r0_complement(rho);  // 1 - r0, cancellation-free

  ZPosterior post;
  post.mean = (a * r0 + b) * unit_phase(p_hat, abs_p);
  // var = a^2 (1 - r0^2) + 1/(1/nu_w + 1/nu_p); the cross terms collapse
  post.var = a * a * delta * (2.0 - delta) + nu_w * nu_p / s;
  if (post.var < 0.0) post.var = 0.0;
  post.log_scale = rician_log_scale(nu_w, y, abs_p, nu_p);
  return post;
}

ZPosterior awgn_posterior(double nu_w, cd u, cd p_hat, double nu_p) {
  check_vars(nu_w, nu_p);
  const double s = nu_w + nu_p;
  ZPosterior post;
  post.mean = (nu_w * p_hat + nu_p * u) / s;
  post.var = nu_w * nu_p / s;
  post.log_scale = -std::log(M_PI * s) - std::norm(u - p_hat) / s;
  return post;
}

PostNoiseModel gaussian_noise_model(double var) {
  if (!(var > 0.0)) throw std::invalid_argument("noise model: variance must be positive");
  const double sigma = std::sqrt(var);
  PostNoiseModel model;
  model.pdf = [var, sigma](double w) {
    return std::exp(-0.5 * w * w / var) / (sigma * std::sqrt(2.0 * M_PI));
  };
  model.lo = -10.0 * sigma;
  model.hi = 10.0 * sigma;
  return model;
}

PostNoiseModel truncated_gaussian_noise_model(double var) {
  if (!(var > 0.0)) throw std::invalid_argument("noise model: variance must be positive");
  const double sigma = std::sqrt(var);
  PostNoiseModel model;
  model.pdf = [var, sigma](double w) {
    if (w < 0.0) return 0.0;
    return 2.0 * std::exp(-0.5 * w * w / var) / (sigma * std::sqrt(2.0 * M_PI));
  };
  model.lo = 0.0;
  model.hi = 10.0 * sigma;
  return model;
}

namespace {

double q_apply(QKind q, double r) { return q == QKind::abs_value ? r : r * r; }

double q_inverse(QKind q, double v) {
  if (v <= 0.0) return 0.0;
  return q == QKind::abs_value ? v : std::sqrt(v);
}

struct RadialSums {
  double c = 0.0, m1 = 0.0, m2 = 0.0;
};

// composite Simpson of the three radial kernels sharing one weight; the
// segment endpoints sit on the noise-support edges, so the integrand is
// smooth inside
RadialSums radial_pass(const PostIntensitySpec& spec, double y, double abs_p, double nu_p,
                       double r_lo, double r_hi, std::size_t points) {
  const double h = (r_hi - r_lo) / double(points);
  RadialSums sums;
  for (std::size_t i = 0; i <= points; ++i) {
    const double r = r_lo + i * h;
    const double lik = spec.noise.pdf(y - q_apply(spec.q, r));
    if (lik == 0.0) continue;
    const double d = r - abs_p;
    const double tau = 2.0 * r * abs_p / nu_p;
    const double base = lik * std::exp(-d * d / nu_p);
    const double k0 = base * i0_scaled(tau);
    const double k1 = base * i1_scaled(tau);
    const double w = (i == 0 || i == points) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    sums.c += w * r * k0;
    sums.m1 += w * r * r * k1;
    sums.m2 += w * r * r * r * k0;
  }
  const double scale = h / 3.0;
  sums.c *= scale;
  sums.m1 *= scale;
  sums.m2 *= scale;
  return sums;
}

bool close(double a, double b, double tol) {
  return std::fabs(a - b) <= tol * std::max({std::fabs(a), std::fabs(b), 1e-300});
}

}  // namespace

ZPosterior post_intensity_posterior(const PostIntensitySpec& spec, double y, cd p_hat,
                                    double nu_p) {
  if (!(nu_p > 0.0)) throw std::invalid_argument("channel: nu_p must be positive");
  if (!spec.noise.pdf) throw std::invalid_argument("post-intensity channel: missing density");

  const double abs_p = std::abs(p_hat);
  // q(r) must land inside the noise support [y - hi, y - lo]; outside that
  // window the likelihood is identically zero.  Intersecting with the reach
  // of the pseudo-prior caps the domain on the right.
  const double r_lo = q_inverse(spec.q, y - spec.noise.hi);
  const double window_hi = q_inverse(spec.q, y - spec.noise.lo);
  if (!(window_hi > r_lo))
    throw std::runtime_error(
        "post-intensity posterior: zero evidence (measurement incompatible with support)");
  const double prior_reach = std::max(abs_p + 12.0 * std::sqrt(nu_p),
                                      r_lo + 24.0 * std::sqrt(nu_p));
  const double r_hi = std::min(window_hi, prior_reach);

  RadialSums prev = radial_pass(spec, y, abs_p, nu_p, r_lo, r_hi, spec.quad_min_points);
  std::size_t points = spec.quad_min_points;
  bool stable = false;
  while (points < spec.quad_max_points) {
    points *= 2;
    const RadialSums cur = radial_pass(spec, y, abs_p, nu_p, r_lo, r_hi, points);
    stable = close(cur.c, prev.c, spec.quad_tol) && close(cur.m1, prev.m1, spec.quad_tol) &&
             close(cur.m2, prev.m2, spec.quad_tol);
    prev = cur;
    if (stable) break;
  }
  if (!stable)
    throw std::runtime_error("post-intensity posterior: quadrature did not stabilize at y=" +
                             std::to_string(y));
  if (!(prev.c > 0.0))
    throw std::runtime_error(
        "post-intensity posterior: zero evidence (measurement incompatible with support)");

  ZPosterior post;
  post.mean = (prev.m1 / prev.c) * unit_phase(p_hat, abs_p);
  post.var = prev.m2 / prev.c - std::norm(post.mean);
  if (post.var < 0.0) post.var = 0.0;
  post.log_scale = std::log(2.0 / nu_p) + std::log(prev.c);
  return post;
}

RicianChannel::RicianChannel(dvec y, double nu_w) : y_(std::move(y)), nu_w_(nu_w) {
  if (!(nu_w_ > 0.0)) throw std::invalid_argument("rician channel: nu_w must be positive");
  for (double v : y_)
    if (!(v >= 0.0)) throw std::invalid_argument("rician channel: magnitudes must be >= 0");
}

ZPosterior RicianChannel::posterior(std::size_t m, cd p_hat, double nu_p) const {
  return rician_posterior(nu_w_, y_.at(m), p_hat, nu_p);
}

namespace {

double magnitude_residual(const dvec& y, const cvec& z, QKind q) {
  if (y.size() != z.size()) throw std::invalid_argument("residual: dimension mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t m = 0; m < y.size(); ++m) {
    const double zm = q == QKind::abs_value ? std::abs(z[m]) : std::norm(z[m]);
    const double d = y[m] - zm;
    num += d * d;
    den += y[m] * y[m];
  }
  if (!(den > 0.0)) throw std::invalid_argument("residual: zero measurement vector");
  return num / den;
}

}  // namespace

double RicianChannel::residual(const cvec& z) const {
  return magnitude_residual(y_, z, QKind::abs_value);
}

AwgnChannel::AwgnChannel(cvec u, double nu_w) : u_(std::move(u)), nu_w_(nu_w) {
  if (!(nu_w_ > 0.0)) throw std::invalid_argument("awgn channel: nu_w must be positive");
}

ZPosterior AwgnChannel::posterior(std::size_t m, cd p_hat, double nu_p) const {
  return awgn_posterior(nu_w_, u_.at(m), p_hat, nu_p);
}

double AwgnChannel::residual(const cvec& z) const {
  if (u_.size() != z.size()) throw std::invalid_argument("residual: dimension mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t m = 0; m < u_.size(); ++m) {
    num += std::norm(u_[m] - z[m]);
    den += std::norm(u_[m]);
  }
  if (!(den > 0.0)) throw std::invalid_argument("residual: zero measurement vector");
  return num / den;
}

PostIntensityChannel::PostIntensityChannel(dvec y, PostIntensitySpec spec)
    : y_(std::move(y)), spec_(std::move(spec)) {}

ZPosterior PostIntensityChannel::posterior(std::size_t m, cd p_hat, double nu_p) const {
  return post_intensity_posterior(spec_, y_.at(m), p_hat, nu_p);
}

double PostIntensityChannel::residual(const cvec& z) const {
  return magnitude_residual(y_, z, spec_.q);
}

}  // namespace prgamp
