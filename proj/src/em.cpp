#include "prgamp/em.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "prgamp/bessel.hpp"

namespace prgamp {

namespace {

double y_norm_sq(const dvec& y) {
  double acc = 0.0;
  for (double v : y) acc += v * v;
  return acc;
}

// golden-section maximization of f over [lo, hi] (log-variance coordinates);
// returns the best point seen, including the bracket ends
template <typename F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, double tol) {
  const double gr = 0.6180339887498948482;
  double a = lo, b = hi;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fa = f(a), fb = f(b), fc = f(c), fd = f(d);
  double best_x = a, best_f = fa;
  auto consider = [&](double x, double fx) {
    if (fx > best_f) {
      best_f = fx;
      best_x = x;
    }
  };
  consider(b, fb);
  consider(c, fc);
  consider(d, fd);
  for (int it = 0; it < 200 && (b - a) > tol; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
      consider(c, fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
      consider(d, fd);
    }
  }
  return {best_x, best_f};
}

}  // namespace

double init_nuw(const dvec& y, double snr_init) {
  if (y.empty()) throw std::invalid_argument("init_nuw: empty measurement vector");
  if (!(snr_init >= 0.0)) throw std::invalid_argument("init_nuw: snr_init must be >= 0");
  const double e = y_norm_sq(y);
  if (!(e > 0.0)) throw std::invalid_argument("init_nuw: zero measurement vector");
  return e / (double(y.size()) * (snr_init + 1.0));
}

double em_log_evidence(const dvec& y, const cvec& p_bar, const dvec& nu_p, double nu_w) {
  if (p_bar.size() != y.size() || nu_p.size() != y.size())
    throw std::invalid_argument("em_log_evidence: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i)
    acc += rician_log_scale(nu_w, y[i], std::abs(p_bar[i]), nu_p[i]);
  return acc;
}

double em_update_nuw(const dvec& y, const BetheFixedPoint& fp, double current_nuw,
                     const EmConfig& cfg) {
  if (cfg.grid_points < 8)
    throw std::invalid_argument("em_update_nuw: need at least 8 grid points");
  if (!(cfg.decades > 0.0)) throw std::invalid_argument("em_update_nuw: decades must be > 0");
  if (!(current_nuw > 0.0) || !std::isfinite(current_nuw))
    throw std::invalid_argument("em_update_nuw: current estimate must be positive");
  if (y.empty()) throw std::invalid_argument("em_update_nuw: empty measurement vector");

  const double scale = y_norm_sq(y) / double(y.size());
  const double clip_lo = 1e-12 * scale, clip_hi = 1e12 * scale;

  const auto objective = [&](double nu_w) {
    try {
      return em_log_evidence(y, fp.p_bar, fp.nu_p, nu_w);
    } catch (const std::exception&) {
      return std::numeric_limits<double>::quiet_NaN();  // invalid data counts as non-finite
    }
  };

  // log-spaced candidates around the current estimate, current included
  const double center = std::log(current_nuw);
  const double half = cfg.decades * std::log(10.0);
  std::vector<double> grid;
  grid.reserve(cfg.grid_points + 1);
  for (std::size_t k = 0; k < cfg.grid_points; ++k) {
    const double frac = cfg.grid_points == 1
                            ? 0.5
                            : double(k) / double(cfg.grid_points - 1);
    grid.push_back(center + (2.0 * frac - 1.0) * half);
  }
  grid.push_back(center);
  std::sort(grid.begin(), grid.end());

  double best_log = 0.0, best_obj = -std::numeric_limits<double>::infinity();
  std::size_t best_idx = grid.size();
  double current_obj = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double obj = objective(std::exp(grid[k]));
    if (grid[k] == center) current_obj = obj;
    if (std::isfinite(obj) && obj > best_obj) {
      best_obj = obj;
      best_log = grid[k];
      best_idx = k;
    }
  }
  if (best_idx == grid.size())
    throw EmFailure("noise-variance update: objective not finite anywhere on the grid");

  // refine between the grid neighbors of the best candidate; a best point on
  // a grid edge means the maximum may lie beyond it, so the bracket then
  // stretches to the admissible boundary
  double lo = best_idx == 0 ? std::log(clip_lo) : grid[best_idx - 1];
  double hi = best_idx + 1 >= grid.size() ? std::log(clip_hi) : grid[best_idx + 1];
  lo = std::min(lo, best_log);
  hi = std::max(hi, best_log);
  double refined_log = best_log, refined_obj = best_obj;
  if (hi > lo) {
    const auto [x, fx] = golden_max([&](double lg) { return objective(std::exp(lg)); }, lo,
                                    hi, std::log1p(cfg.refine_tol));
    if (std::isfinite(fx) && fx > refined_obj) {
      refined_log = x;
      refined_obj = fx;
    }
  }

  const double clipped = std::clamp(std::exp(refined_log), clip_lo, clip_hi);
  const double clipped_obj =
      clipped == std::exp(refined_log) ? refined_obj : objective(clipped);

  // never step downhill relative to the incumbent estimate
  if (std::isfinite(current_obj) && current_obj > clipped_obj) return current_nuw;
  return clipped;
}

namespace {

// posterior-mean magnitude of the tilted magnitude channel as a function of
// the center magnitude q, and its derivative in q
struct RadialMean {
  double nu_w, nu_p, y;
  double operator()(double q) const {
    const double s = nu_w + nu_p;
    const double rho = 2.0 * y * q / s;
    return (y * nu_p / s) * bessel_ratio_r0(rho) + q * nu_w / s;
  }
  double derivative(double q) const {
    const double s = nu_w + nu_p;
    const double rho = 2.0 * y * q / s;
    const double r0 = bessel_ratio_r0(rho);
    // d/d rho of I1/I0 = 1 - r0/rho - r0^2, with the rho -> 0 limit 1/2
    const double dr0 = rho > 1e-12 ? 1.0 - r0 / rho - r0 * r0 : 0.5;
    return (y * nu_p / s) * (2.0 * y / s) * dr0 + nu_w / s;
  }
};

// solve mean(q) = target for q >= 0; Newton from `start`, safeguarded by a
// growing bisection bracket; returns negative on failure
double solve_radial_center(const RadialMean& mean, double target, double start) {
  if (!(target >= 0.0)) return -1.0;
  if (target == 0.0) return 0.0;
  const double tol = 1e-8;
  // establish a bracket [lo, hi] with mean(lo) <= target <= mean(hi)
  double lo = 0.0, hi = std::max(start, target);
  for (int i = 0; i < 200 && mean(hi) < target; ++i) hi *= 2.0;
  if (mean(hi) < target) return -1.0;

  double q = std::min(std::max(start, lo), hi);
  for (int it = 0; it < 100; ++it) {
    const double f = mean(q) - target;
    if (std::abs(f) <= tol * target) return q;
    if (f > 0.0)
      hi = q;
    else
      lo = q;
    const double d = mean.derivative(q);
    double next = d > 0.0 ? q - f / d : -1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // bisect when Newton leaves the bracket
    q = next;
  }
  return std::abs(mean(q) - target) <= tol * target ? q : -1.0;
}

}  // namespace

cvec solve_pbar(const OutputChannel& channel, const cvec& z_hat, const dvec& nu_p,
                const cvec& p_start, bool exact, std::size_t* fallbacks) {
  const std::size_t m = channel.size();
  if (z_hat.size() != m || nu_p.size() != m || p_start.size() != m)
    throw std::invalid_argument("solve_pbar: length mismatch");
  if (fallbacks) *fallbacks = 0;
  if (!exact) return p_start;

  if (const auto* awgn = dynamic_cast<const AwgnChannel*>(&channel)) {
    // linear channel: the tilted mean is (nu_p u + nu_w p) / (nu_p + nu_w),
    // solved for p in closed form
    cvec out(m);
    for (std::size_t i = 0; i < m; ++i)
      out[i] = z_hat[i] + (nu_p[i] / awgn->noise_var()) * (z_hat[i] - awgn->u()[i]);
    return out;
  }

  const auto* rice = dynamic_cast<const RicianChannel*>(&channel);
  if (!rice) {
    if (fallbacks) *fallbacks = m;
    return p_start;  // no exact solve available for this channel
  }

  cvec out(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double target = std::abs(z_hat[i]);
    if (nu_p[i] <= 0.0) {
      out[i] = z_hat[i];  // delta tilt: center and mean coincide
      continue;
    }
    const RadialMean mean{rice->noise_var(), nu_p[i], rice->y()[i]};
    const double q = solve_radial_center(mean, target, std::abs(p_start[i]));
    if (q < 0.0) {
      if (fallbacks) ++*fallbacks;
      out[i] = p_start[i];
    } else if (target == 0.0) {
      out[i] = cd{};
    } else {
      out[i] = std::polar(q, std::arg(z_hat[i]));
    }
  }
  return out;
}

}  // namespace prgamp
