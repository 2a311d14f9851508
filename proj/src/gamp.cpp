#include "prgamp/gamp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace prgamp {

namespace {

double mean_of(const dvec& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

GampEngine::GampEngine(const MeasurementOperator& op, const BernoulliGaussianPrior& prior,
                       const GampConfig& config, GampInit init)
    : op_(op), prior_(prior), cfg_(config) {
  if (!(cfg_.damping > 0.0 && cfg_.damping <= 1.0))
    throw std::invalid_argument("gamp: damping must be in (0,1]");
  if (cfg_.max_iters < 1) throw std::invalid_argument("gamp: max_iters must be >= 1");
  if (init.x_hat.size() != op.cols())
    throw std::invalid_argument("gamp: init estimate has wrong length");
  if (!(init.nu_x > 0.0)) throw std::invalid_argument("gamp: initial variance must be > 0");

  uniform_ = cfg_.uniform_variance;
  if (!uniform_ && !op.supports_abs_sq()) {
    // per-entry variance propagation needs squared-magnitude applies;
    // FFT-composed operators fall back to the scalar-variance recursion
    uniform_ = true;
    forced_uniform_ = true;
  }

  const std::size_t m = op.rows(), n = op.cols();
  x_hat_ = std::move(init.x_hat);
  x_bar_ = x_hat_;
  p_hat_.assign(m, cd{});
  z_hat_.assign(m, cd{});
  s_bar_.assign(m, cd{});
  r_hat_.assign(n, cd{});
  nu_x_.assign(uniform_ ? 0 : n, init.nu_x);
  nu_p_.assign(uniform_ ? 0 : m, 0.0);
  nu_s_bar_.assign(uniform_ ? 0 : m, 0.0);
  nu_r_bar_.assign(uniform_ ? 0 : n, 0.0);
  nu_x_s_ = init.nu_x;
}

double GampEngine::floor_var(double v) {
  if (std::isnan(v))
    throw GampDivergence(t_, "gamp: variance turned NaN at iteration " + std::to_string(t_));
  if (v < cfg_.variance_floor) {
    ++floor_hits_;
    return cfg_.variance_floor;
  }
  return std::min(v, 1e18);  // an infinite variance means "no information", kept finite
}

double GampEngine::mean_nu_x() const { return uniform_ ? nu_x_s_ : mean_of(nu_x_); }

dvec GampEngine::nu_p_full() const {
  if (!uniform_) return nu_p_;
  return dvec(op_.rows(), nu_p_s_);
}

dvec GampEngine::nu_r_unnormalized() const {
  if (!uniform_) {
    dvec out(nu_r_bar_);
    for (double& v : out) v *= alpha_prev_;
    return out;
  }
  return dvec(op_.cols(), alpha_prev_ * nu_r_s_);
}

void GampEngine::push_beliefs(cvec& z, dvec& nu_p) const {
  z = op_.forward(x_hat_);
  if (uniform_) {
    const double v = op_.frobenius_sq() * nu_x_s_ / double(op_.rows());
    nu_p.assign(op_.rows(), std::clamp(v, cfg_.variance_floor, 1e18));
  } else {
    nu_p = op_.abs_sq_forward(nu_x_);
    for (double& v : nu_p) v = std::clamp(v, cfg_.variance_floor, 1e18);
  }
}

double GampEngine::step(const OutputChannel& channel) {
  const std::size_t m = op_.rows(), n = op_.cols();
  if (channel.size() != m) throw std::invalid_argument("gamp: channel size mismatch");

  ++t_;
  const double beta = t_ == 1 ? 1.0 : cfg_.damping;
  const double alpha_old = alpha_prev_;  // normalizer carried by s_bar(t-1)

  // variance of the transform estimate, with damping
  double alpha;
  if (uniform_) {
    nu_p_s_ = floor_var(beta * op_.frobenius_sq() * nu_x_s_ / double(m) +
                        (1.0 - beta) * nu_p_s_);
    alpha = nu_p_s_;
  } else {
    const dvec spread = op_.abs_sq_forward(nu_x_);
    for (std::size_t i = 0; i < m; ++i)
      nu_p_[i] = floor_var(beta * spread[i] + (1.0 - beta) * nu_p_[i]);
    alpha = mean_of(nu_p_);
  }

  // transform estimate with the self-feedback correction; the stored residual
  // carries the previous iteration's normalizer, so that is what divides it
  z_hat_ = op_.forward(x_hat_);
  last_nres_ = channel.residual(z_hat_);
  for (std::size_t i = 0; i < m; ++i) {
    const double nup = uniform_ ? nu_p_s_ : nu_p_[i];
    p_hat_[i] = z_hat_[i] - (nup / alpha_old) * s_bar_[i];
  }

  // measurement update: posterior of each transform coefficient, folded into
  // the normalized, damped residual and inverse-variance
  double nu_s_acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double nup = uniform_ ? nu_p_s_ : nu_p_[i];
    const ZPosterior post = channel.posterior(i, p_hat_[i], nup);
    const cd g = (post.mean - p_hat_[i]) / nup;
    const double ng = (1.0 - post.var / nup) / nup;  // -g', nonneg for sane channels
    s_bar_[i] = beta * alpha * g + (1.0 - beta) * s_bar_[i];
    if (uniform_) {
      nu_s_acc += ng;
    } else {
      nu_s_bar_[i] = floor_var(beta * alpha * ng + (1.0 - beta) * nu_s_bar_[i]);
    }
  }
  if (uniform_)
    nu_s_s_ = floor_var(beta * alpha * nu_s_acc / double(m) + (1.0 - beta) * nu_s_s_);

  // pseudo-measurement variance
  if (uniform_) {
    nu_r_s_ = floor_var(1.0 / std::max(op_.frobenius_sq() * nu_s_s_ / double(n), 1e-300));
  } else {
    const dvec denom = op_.abs_sq_adjoint(nu_s_bar_);
    for (std::size_t i = 0; i < n; ++i)
      nu_r_bar_[i] = floor_var(1.0 / std::max(denom[i], 1e-300));
  }

  // damped input estimate and pseudo-measurement
  const cvec back = op_.adjoint(s_bar_);
  for (std::size_t i = 0; i < n; ++i) {
    x_bar_[i] = beta * x_hat_[i] + (1.0 - beta) * x_bar_[i];
    const double nur = uniform_ ? nu_r_s_ : nu_r_bar_[i];
    r_hat_[i] = x_bar_[i] + nur * back[i];
  }

  // coefficient posterior under the prior; the normalizer cancels out of the
  // pseudo-variance product
  double dx2 = 0.0, x2 = 0.0, nu_x_acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double nur = uniform_ ? nu_r_s_ : nu_r_bar_[i];
    const double pseudo = floor_var(alpha * nur);
    const XPosterior post = bg_posterior(prior_, r_hat_[i], pseudo);
    dx2 += std::norm(post.mean - x_hat_[i]);
    x2 += std::norm(x_hat_[i]);
    x_hat_[i] = post.mean;
    if (uniform_) {
      nu_x_acc += post.var;
    } else {
      nu_x_[i] = floor_var(post.var);
    }
  }
  if (uniform_) nu_x_s_ = floor_var(nu_x_acc / double(n));

  alpha_prev_ = alpha;

  double health = alpha + (uniform_ ? nu_x_s_ + nu_s_s_ + nu_r_s_ : 0.0) + dx2 + x2;
  for (std::size_t i = 0; i < m; ++i) health += std::norm(s_bar_[i]);
  if (!uniform_)
    for (std::size_t i = 0; i < n; ++i) health += nu_x_[i] + nu_r_bar_[i];
  if (!finite(health))
    throw GampDivergence(t_, "gamp: state diverged (non-finite values) at iteration " +
                                 std::to_string(t_));

  if (x2 > 0.0) return std::sqrt(dx2 / x2);
  return dx2 > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

GampResult gamp_run(const MeasurementOperator& op, const OutputChannel& channel,
                    const BernoulliGaussianPrior& prior, const GampConfig& config,
                    const GampInit& init) {
  GampEngine engine(op, prior, config, init);
  GampResult result;
  result.forced_uniform = engine.forced_uniform();
  for (std::size_t t = 1; t <= config.max_iters; ++t) {
    const double entry_nu_x = engine.mean_nu_x();
    const double rel = engine.step(channel);
    result.trace.push_back({t, engine.last_residual(), entry_nu_x, engine.alpha()});
    result.iterations = t;
    if (rel < config.tol_x) {
      result.converged = true;
      break;
    }
  }
  result.x_hat = engine.x_hat();
  result.nu_x = engine.uniform_mode() ? dvec(op.cols(), engine.mean_nu_x()) : engine.nu_x();
  result.r_hat = engine.r_hat();
  result.nu_r = engine.nu_r_unnormalized();
  result.s_bar = engine.s_bar();
  result.floor_hits = engine.floor_hits();
  return result;
}

double compute_nres(const MeasurementOperator& op, const cvec& x_hat, const dvec& y) {
  if (y.size() != op.rows()) throw std::invalid_argument("nres: dimension mismatch");
  const cvec z = op.forward(x_hat);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = y[i] - std::abs(z[i]);
    num += d * d;
    den += y[i] * y[i];
  }
  if (!(den > 0.0)) throw std::invalid_argument("nres: zero measurement vector");
  return num / den;
}

}  // namespace prgamp
