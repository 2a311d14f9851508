#pragma once

#include <functional>
#include <memory>

#include "prgamp/types.hpp"

namespace prgamp {

// Posterior of one transform coefficient z under a measurement channel,
// given the pseudo-prior z ~ CN(p_hat, nu_p).  log_scale is the log of the
// normalizing constant (the per-measurement evidence), which the noise-EM
// update maximizes.
struct ZPosterior {
  cd mean;
  double var;
  double log_scale;
};

// magnitude measurement y = |z + w|, w ~ CN(0, nu_w); Rician likelihood
ZPosterior rician_posterior(double nu_w, double y, cd p_hat, double nu_p);

// evidence term alone (what the EM grid search evaluates, many times)
double rician_log_scale(double nu_w, double y, double abs_p_hat, double nu_p);

// phase-oracle channel u = z + w, w ~ CN(0, nu_w)
ZPosterior awgn_posterior(double nu_w, cd u, cd p_hat, double nu_p);

// ---- additive noise on a magnitude map: y = q(|z|) + w ----

enum class QKind { abs_value, abs_squared };

// real scalar noise density with finite working support [lo, hi]
struct PostNoiseModel {
  std::function<double(double)> pdf;
  double lo = 0.0;
  double hi = 0.0;
};

PostNoiseModel gaussian_noise_model(double var);
// Gaussian restricted to w >= 0 (keeps intensity data nonnegative)
PostNoiseModel truncated_gaussian_noise_model(double var);

struct PostIntensitySpec {
  QKind q = QKind::abs_value;
  PostNoiseModel noise;
  double quad_tol = 1e-8;
  std::size_t quad_min_points = 2048;
  std::size_t quad_max_points = 1 << 17;
};

ZPosterior post_intensity_posterior(const PostIntensitySpec& spec, double y, cd p_hat,
                                    double nu_p);

// ---- per-measurement vector channels used by the iteration ----

class OutputChannel {
 public:
  virtual ~OutputChannel() = default;
  virtual std::size_t size() const = 0;
  virtual ZPosterior posterior(std::size_t m, cd p_hat, double nu_p) const = 0;
  // normalized residual of a transform-domain estimate z = A x_hat against
  // this channel's measurements (the restart/stop statistic)
  virtual double residual(const cvec& z) const = 0;
};

class RicianChannel : public OutputChannel {
 public:
  RicianChannel(dvec y, double nu_w);
  std::size_t size() const override { return y_.size(); }
  ZPosterior posterior(std::size_t m, cd p_hat, double nu_p) const override;
  double residual(const cvec& z) const override;
  const dvec& y() const { return y_; }
  double noise_var() const { return nu_w_; }

 private:
  dvec y_;
  double nu_w_;
};

class AwgnChannel : public OutputChannel {
 public:
  AwgnChannel(cvec u, double nu_w);
  std::size_t size() const override { return u_.size(); }
  ZPosterior posterior(std::size_t m, cd p_hat, double nu_p) const override;
  double residual(const cvec& z) const override;
  const cvec& u() const { return u_; }
  double noise_var() const { return nu_w_; }

 private:
  cvec u_;
  double nu_w_;
};

class PostIntensityChannel : public OutputChannel {
 public:
  PostIntensityChannel(dvec y, PostIntensitySpec spec);
  std::size_t size() const override { return y_.size(); }
  ZPosterior posterior(std::size_t m, cd p_hat, double nu_p) const override;
  double residual(const cvec& z) const override;
  const dvec& y() const { return y_; }

 private:
  dvec y_;
  PostIntensitySpec spec_;
};

}  // namespace prgamp
