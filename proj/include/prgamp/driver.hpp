#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "prgamp/em.hpp"
#include "prgamp/gamp.hpp"
#include "prgamp/linops.hpp"
#include "prgamp/priors.hpp"
#include "prgamp/types.hpp"

namespace prgamp {

// Multi-restart outer loop: repeated runs of the iteration from fresh random
// starting points until the measurement residual is small enough.
struct DriverConfig {
  std::size_t max_attempts = 10;
  double nres_stop = 0.0;     // attempt accepted when its residual drops below this
  GampConfig gamp;
  std::uint64_t seed = 0;     // master seed; attempts use derived sub-seeds
  bool em_enabled = false;    // learn the noise variance while iterating
  double oracle_nuw = -1.0;   // >= 0: use this known noise variance, skip learning
  EmConfig em;
};

struct AttemptRecord {
  std::uint64_t seed = 0;
  double nres = 0.0;          // infinity for a diverged attempt
  std::size_t iterations = 0;
  bool diverged = false;
  double nuw_final = 0.0;     // noise variance in effect when the attempt ended
};

struct RecoveryResult {
  cvec x_best;
  double nres_best = 0.0;
  std::size_t attempts_used = 0;
  std::vector<AttemptRecord> attempts;
  double wall_seconds = 0.0;
  std::size_t em_updates = 0;              // noise-variance updates across all attempts
  std::size_t em_certificate_failures = 0; // updates whose local-max check failed
  std::size_t em_failures = 0;             // updates abandoned for a non-finite objective
};

// raised when every attempt diverged; carries the per-attempt diagnostics
class AllAttemptsDiverged : public std::runtime_error {
 public:
  AllAttemptsDiverged(std::string what, std::vector<AttemptRecord> attempts)
      : std::runtime_error(std::move(what)), attempts_(std::move(attempts)) {}
  const std::vector<AttemptRecord>& attempts() const { return attempts_; }

 private:
  std::vector<AttemptRecord> attempts_;
};

// residual threshold from the (true) SNR in dB: 10^(-(snr_db + 2)/10)
double default_nres_stop(double snr_db);

// magnitude-only recovery with restarts and optional noise-variance learning
RecoveryResult pr_gamp(const dvec& y, const MeasurementOperator& op,
                       const BernoulliGaussianPrior& prior, const DriverConfig& cfg);

// phase-oracle counterpart: same restart scaffolding on the linear channel,
// residual measured as ||u - A x||^2 / ||u||^2
RecoveryResult po_gamp(const cvec& u, double nu_w, const MeasurementOperator& op,
                       const BernoulliGaussianPrior& prior, const DriverConfig& cfg);

}  // namespace prgamp
