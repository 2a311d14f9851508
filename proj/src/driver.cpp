#include "prgamp/driver.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <memory>

#include "prgamp/rng.hpp"

namespace prgamp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// starting point and its scalar variance for one attempt
GampInit attempt_init(const BernoulliGaussianPrior& prior, std::size_t n,
                      std::uint64_t sub_seed) {
  GampInit init;
  init.x_hat = draw_prior_sample(prior, n, sub_seed);
  double energy = 0.0;
  for (const auto& v : init.x_hat) energy += std::norm(v);  // prior mean is zero
  init.nu_x = energy / double(n);
  if (!(init.nu_x > 0.0)) init.nu_x = std::max(prior.lambda * prior.phi, 1e-12);
  return init;
}

void validate(const DriverConfig& cfg) {
  if (cfg.max_attempts < 1)
    throw std::invalid_argument("driver: max_attempts must be >= 1");
  if (!(cfg.nres_stop >= 0.0)) throw std::invalid_argument("driver: nres_stop must be >= 0");
}

struct AttemptOutcome {
  AttemptRecord record;
  cvec x_hat;
};

}  // namespace

double default_nres_stop(double snr_db) { return std::pow(10.0, -(snr_db + 2.0) / 10.0); }

RecoveryResult pr_gamp(const dvec& y, const MeasurementOperator& op,
                       const BernoulliGaussianPrior& prior, const DriverConfig& cfg) {
  validate(cfg);
  if (y.size() != op.rows()) throw std::invalid_argument("driver: measurement length != M");
  const auto t_start = std::chrono::steady_clock::now();

  RecoveryResult result;
  result.nres_best = kInf;

  const bool oracle = cfg.oracle_nuw >= 0.0;
  for (std::size_t attempt = 1; attempt <= cfg.max_attempts; ++attempt) {
    const std::uint64_t sub_seed = mix_seed(cfg.seed, attempt);
    AttemptRecord record;
    record.seed = sub_seed;

    try {
      GampEngine engine(op, prior, cfg.gamp, attempt_init(prior, op.cols(), sub_seed));
      double nuw = oracle ? cfg.oracle_nuw : init_nuw(y, cfg.em.snr_init);
      auto channel = std::make_unique<RicianChannel>(dvec(y), nuw);

      for (std::size_t t = 1; t <= cfg.gamp.max_iters; ++t) {
        const double rel = engine.step(*channel);
        record.iterations = t;

        if (cfg.em_enabled && !oracle && t % std::max<std::size_t>(cfg.em.update_every, 1) == 0) {
          BetheFixedPoint fp;
          if (cfg.em.exact_pbar) {
            // solve for the tilting centers consistent with the coefficient
            // beliefs: the center whose tilted posterior mean equals A x_hat
            engine.push_beliefs(fp.z_hat, fp.nu_p);
            fp.p_bar = solve_pbar(*channel, fp.z_hat, fp.nu_p, engine.p_hat(), true);
          } else {
            fp.nu_p = engine.nu_p_full();
            fp.p_bar = engine.p_hat();
          }
          try {
            const double next = em_update_nuw(y, fp, nuw, cfg.em);
            ++result.em_updates;
            // local-max certificate: neither doubling nor halving may improve
            const double at = em_log_evidence(y, fp.p_bar, fp.nu_p, next);
            const double up = em_log_evidence(y, fp.p_bar, fp.nu_p, 2.0 * next);
            const double dn = em_log_evidence(y, fp.p_bar, fp.nu_p, 0.5 * next);
            const double slack = 1e-9 * (1.0 + std::abs(at));
            if (!(at + slack >= up && at + slack >= dn)) ++result.em_certificate_failures;
            if (next != nuw) {
              nuw = next;
              channel = std::make_unique<RicianChannel>(dvec(y), nuw);
            }
          } catch (const EmFailure&) {
            ++result.em_failures;  // keep the previous estimate
          }
        }

        if (rel < cfg.gamp.tol_x) break;
      }

      record.nuw_final = nuw;
      record.nres = compute_nres(op, engine.x_hat(), y);
      if (!std::isfinite(record.nres)) {  // unusable estimate counts as a failed attempt
        record.diverged = true;
        record.nres = kInf;
      }
      result.attempts.push_back(record);
      if (record.nres < result.nres_best) {
        result.nres_best = record.nres;
        result.x_best = engine.x_hat();
      }
    } catch (const GampDivergence& e) {
      record.diverged = true;
      record.nres = kInf;
      record.iterations = e.iteration();
      result.attempts.push_back(record);
    }

    result.attempts_used = attempt;
    if (result.nres_best < cfg.nres_stop) break;
  }

  if (result.x_best.empty()) {
    std::string msg = "recovery failed: all " + std::to_string(result.attempts_used) +
                      " attempts diverged (iterations:";
    for (const auto& a : result.attempts) msg += " " + std::to_string(a.iterations);
    msg += ")";
    throw AllAttemptsDiverged(msg, result.attempts);
  }

  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return result;
}

RecoveryResult po_gamp(const cvec& u, double nu_w, const MeasurementOperator& op,
                       const BernoulliGaussianPrior& prior, const DriverConfig& cfg) {
  validate(cfg);
  if (u.size() != op.rows()) throw std::invalid_argument("driver: measurement length != M");
  if (!(nu_w > 0.0)) throw std::invalid_argument("driver: noise variance must be > 0");
  const auto t_start = std::chrono::steady_clock::now();

  AwgnChannel channel(cvec(u), nu_w);
  RecoveryResult result;
  result.nres_best = kInf;

  for (std::size_t attempt = 1; attempt <= cfg.max_attempts; ++attempt) {
    const std::uint64_t sub_seed = mix_seed(cfg.seed, attempt);
    AttemptRecord record;
    record.seed = sub_seed;
    record.nuw_final = nu_w;

    try {
      GampEngine engine(op, prior, cfg.gamp, attempt_init(prior, op.cols(), sub_seed));
      for (std::size_t t = 1; t <= cfg.gamp.max_iters; ++t) {
        const double rel = engine.step(channel);
        record.iterations = t;
        if (rel < cfg.gamp.tol_x) break;
      }
      record.nres = channel.residual(op.forward(engine.x_hat()));
      if (!std::isfinite(record.nres)) {  // unusable estimate counts as a failed attempt
        record.diverged = true;
        record.nres = kInf;
      }
      result.attempts.push_back(record);
      if (record.nres < result.nres_best) {
        result.nres_best = record.nres;
        result.x_best = engine.x_hat();
      }
    } catch (const GampDivergence& e) {
      record.diverged = true;
      record.nres = kInf;
      record.iterations = e.iteration();
      result.attempts.push_back(record);
    }

    result.attempts_used = attempt;
    if (result.nres_best < cfg.nres_stop) break;
  }

  if (result.x_best.empty()) {
    throw AllAttemptsDiverged(
        "recovery failed: all " + std::to_string(result.attempts_used) + " attempts diverged",
        result.attempts);
  }

  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return result;
}

}  // namespace prgamp
