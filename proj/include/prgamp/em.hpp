#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "prgamp/channels.hpp"
#include "prgamp/types.hpp"

namespace prgamp {

// Expectation-maximization learning of the measurement-noise variance,
// interleaved with the message-passing iterations.
struct EmConfig {
  double decades = 3.0;         // log-search half-width around the current estimate
  std::size_t grid_points = 40;
  double refine_tol = 1e-4;     // relative width at which the refinement stops
  double snr_init = 10.0;       // assumed SNR behind the very first estimate
  std::size_t update_every = 1; // iterations between updates
  bool exact_pbar = false;      // default reuses p_hat as the tilting center; the exact
                                // mode solves the tilted-mean equation against the
                                // coefficient-side beliefs (A x_hat), which only matters
                                // away from a fixed point
};

// the per-measurement quantities the noise-variance objective is built from
struct BetheFixedPoint {
  cvec p_bar;   // tilting centers
  dvec nu_p;    // their variances
  cvec z_hat;   // transform-domain posterior means
  dvec nu_z;    // their variances
};

class EmFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// first noise-variance estimate: ||y||^2 / (M (snr_init + 1))
double init_nuw(const dvec& y, double snr_init);

// sum over measurements of the log evidence ln C_m at a trial noise variance
double em_log_evidence(const dvec& y, const cvec& p_bar, const dvec& nu_p, double nu_w);

// one EM update: maximize the summed log evidence over the noise variance by a
// log-grid search (the current estimate is always a grid member) followed by
// golden-section refinement; the result is clipped to [1e-12, 1e12] ||y||^2/M
// and never has a lower objective than the current estimate.
double em_update_nuw(const dvec& y, const BetheFixedPoint& fp, double current_nuw,
                     const EmConfig& cfg);

// Tilting centers for the evidence objective.  In the default approximate mode
// this returns `p_start` (the engine's own transform-domain pseudo-prior mean)
// unchanged.  In exact mode it solves, per measurement, for the center whose
// tilted posterior mean equals z_hat: magnitude channels get a radial
// Newton-with-bisection solve (phase fixed to the phase of z_hat, relative
// tolerance 1e-8, at most 100 steps, falling back to p_start on
// non-convergence and counting the fallback), the phase-oracle channel a
// closed form.  Channels with no exact solve fall back to p_start wholesale.
cvec solve_pbar(const OutputChannel& channel, const cvec& z_hat, const dvec& nu_p,
                const cvec& p_start, bool exact, std::size_t* fallbacks = nullptr);

}  // namespace prgamp
