#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "prgamp/channels.hpp"
#include "prgamp/linops.hpp"
#include "prgamp/priors.hpp"
#include "prgamp/types.hpp"

namespace prgamp {

struct GampConfig {
  double damping = 0.25;        // convex blend weight for the damped lines
  std::size_t max_iters = 500;
  bool uniform_variance = false;
  double tol_x = 1e-8;          // stop when ||dx||/||x|| drops below this
  double variance_floor = 1e-12;
};

struct GampInit {
  cvec x_hat;       // x estimate entering iteration 1
  double nu_x = 1;  // its (uniform) variance; the s residual starts at zero
};

// thrown when a state vector turns NaN/Inf
class GampDivergence : public std::runtime_error {
 public:
  GampDivergence(std::size_t iteration, const std::string& what)
      : std::runtime_error(what), iteration_(iteration) {}
  std::size_t iteration() const { return iteration_; }

 private:
  std::size_t iteration_;
};

struct GampTraceRow {
  std::size_t iteration;
  double nres;       // channel residual of A x_hat entering this iteration
  double mean_nu_x;  // mean coefficient variance entering this iteration
  double alpha;      // variance normalizer of this iteration
};

struct GampResult {
  cvec x_hat;
  dvec nu_x;
  cvec r_hat;
  dvec nu_r;  // unnormalized pseudo-measurement variance (alpha * normalized)
  cvec s_bar;
  std::size_t iterations = 0;
  bool converged = false;
  bool forced_uniform = false;  // operator lacks per-entry support, mode switched
  std::size_t floor_hits = 0;
  std::vector<GampTraceRow> trace;
};

// One full damped, normalized iteration sequence, exposed stepwise so a
// caller can interleave noise-variance learning between iterations.
class GampEngine {
 public:
  GampEngine(const MeasurementOperator& op, const BernoulliGaussianPrior& prior,
             const GampConfig& config, GampInit init);

  // runs one iteration against the given channel and returns the relative
  // change ||x(t+1)-x(t)|| / ||x(t)||; throws GampDivergence on NaN/Inf
  double step(const OutputChannel& channel);

  std::size_t iteration() const { return t_; }
  bool uniform_mode() const { return uniform_; }
  bool forced_uniform() const { return forced_uniform_; }
  std::size_t floor_hits() const { return floor_hits_; }
  double alpha() const { return alpha_prev_; }
  double last_residual() const { return last_nres_; }
  double mean_nu_x() const;

  const cvec& x_hat() const { return x_hat_; }
  const dvec& nu_x() const { return nu_x_; }
  const cvec& p_hat() const { return p_hat_; }
  const cvec& z_hat() const { return z_hat_; }  // A x_hat from the last step
  const cvec& s_bar() const { return s_bar_; }
  const cvec& r_hat() const { return r_hat_; }
  dvec nu_p_full() const;  // per-measurement pseudo-prior variance
  dvec nu_r_unnormalized() const;

  // Undamped push-forward of the current coefficient beliefs: z = A x_hat and
  // nu_p = |A|^2 nu_x, evaluated at the estimates left by the most recent
  // step.  Unlike z_hat()/nu_p_full(), which hold mid-iteration state, this
  // pair is mutually consistent, which the noise-variance learner requires.
  void push_beliefs(cvec& z, dvec& nu_p) const;

 private:
  const MeasurementOperator& op_;
  const BernoulliGaussianPrior& prior_;
  GampConfig cfg_;
  bool uniform_ = false;
  bool forced_uniform_ = false;

  std::size_t t_ = 0;
  cvec x_hat_, x_bar_, p_hat_, z_hat_, s_bar_, r_hat_;
  dvec nu_x_, nu_p_, nu_s_bar_, nu_r_bar_;
  double nu_x_s_ = 0, nu_p_s_ = 0, nu_s_s_ = 0, nu_r_s_ = 0;  // uniform-mode scalars
  double alpha_prev_ = 1.0;
  double last_nres_ = 0.0;
  std::size_t floor_hits_ = 0;

  double floor_var(double v);
};

GampResult gamp_run(const MeasurementOperator& op, const OutputChannel& channel,
                    const BernoulliGaussianPrior& prior, const GampConfig& config,
                    const GampInit& init);

// normalized residual ||y - |A x_hat|||^2 / ||y||^2
double compute_nres(const MeasurementOperator& op, const cvec& x_hat, const dvec& y);

}  // namespace prgamp
