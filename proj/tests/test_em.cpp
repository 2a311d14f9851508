#include <cmath>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "prgamp/bessel.hpp"
#include "prgamp/em.hpp"
#include "prgamp/rng.hpp"

using prgamp::cd;
using prgamp::cvec;
using prgamp::dvec;

namespace {

// total likelihood mass of one magnitude measurement over the complex plane,
// by radial quadrature: 2*pi * int r p(y | |z|=r) dr
double channel_mass(double y, double nu_w, std::size_t intervals) {
  const double sigma = std::sqrt(0.5 * nu_w);
  const double lo = std::max(0.0, y - 15.0 * sigma);
  const double hi = y + 15.0 * sigma;
  const double h = (hi - lo) / double(intervals);
  auto f = [&](double r) {
    return r * (2.0 * y / nu_w) * std::exp(-(y - r) * (y - r) / nu_w) *
           prgamp::i0_scaled(2.0 * y * r / nu_w);
  };
  double acc = f(lo) + f(hi);
  for (std::size_t i = 1; i < intervals; ++i)
    acc += f(lo + h * double(i)) * (i % 2 ? 4.0 : 2.0);
  return 2.0 * M_PI * acc * h / 3.0;
}

// a synthetic instance drawn from the magnitude-measurement model itself
struct SyntheticInstance {
  dvec y;
  prgamp::BetheFixedPoint fp;
};

SyntheticInstance draw_instance(std::size_t m, double nu_true, double nu_p_scale,
                                std::uint64_t seed) {
  prgamp::Rng rng(seed);
  SyntheticInstance out;
  out.y.resize(m);
  out.fp.p_bar.resize(m);
  out.fp.nu_p.assign(m, nu_p_scale);
  out.fp.z_hat.resize(m);
  out.fp.nu_z.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const cd center = std::polar(1.0 + 0.3 * std::abs(rng.gaussian()),
                                 2.0 * M_PI * rng.uniform());
    const cd z = center + std::sqrt(nu_p_scale) * rng.cgaussian();
    out.fp.p_bar[i] = center;
    out.fp.z_hat[i] = z;
    out.y[i] = std::abs(z + std::sqrt(nu_true) * rng.cgaussian());
  }
  return out;
}

}  // namespace

TEST_SUITE("em") {

TEST_CASE("initial noise estimate follows the energy formula") {
  // ||y||^2 = 4 * 11 with M = 4 and assumed SNR 10 -> exactly 1
  dvec y{std::sqrt(11.0), std::sqrt(11.0), std::sqrt(11.0), std::sqrt(11.0)};
  CHECK(prgamp::init_nuw(y, 10.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(prgamp::init_nuw(y, 0.0) == doctest::Approx(11.0).epsilon(1e-14));

  // quadratic homogeneity in the measurement scale
  dvec y2(y);
  for (double& v : y2) v *= 3.0;
  CHECK(prgamp::init_nuw(y2, 10.0) == doctest::Approx(9.0).epsilon(1e-14));

  CHECK_THROWS_AS(prgamp::init_nuw(dvec{0.0, 0.0}, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(prgamp::init_nuw(dvec{}, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(prgamp::init_nuw(y, -1.0), std::invalid_argument);
}

TEST_CASE("total likelihood mass per measurement does not depend on the noise level") {
  // the normalizer that multiplies the evidence is a constant in nu_w, so
  // leaving it out of the search objective is harmless; checked numerically
  for (double y : {0.7, 2.4}) {
    const double a = channel_mass(y, 0.1, 40000);
    const double b = channel_mass(y, 2.0, 40000);
    const double expected = 2.0 * M_PI * y;
    CHECK(std::abs(a - expected) <= 1e-6 * expected);
    CHECK(std::abs(b - expected) <= 1e-6 * expected);
  }
}

TEST_CASE("adding a constant per measurement does not move the grid argmax") {
  const auto inst = draw_instance(60, 0.4, 0.2, 42);
  std::vector<double> grid;
  for (int k = -12; k <= 12; ++k) grid.push_back(0.4 * std::pow(10.0, 0.1 * k));
  std::size_t base_arg = 0, shifted_arg = 0;
  double base_best = -1e300, shifted_best = -1e300;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double obj =
        prgamp::em_log_evidence(inst.y, inst.fp.p_bar, inst.fp.nu_p, grid[k]);
    const double shifted = obj + 17.25 * double(inst.y.size());
    if (obj > base_best) {
      base_best = obj;
      base_arg = k;
    }
    if (shifted > shifted_best) {
      shifted_best = shifted;
      shifted_arg = k;
    }
  }
  CHECK(base_arg == shifted_arg);
}

TEST_CASE("noise-variance update is consistent on a large synthetic draw") {
  // 10^4 measurements from the model with nu = 0.25 and a point-mass tilt
  const double nu_true = 0.25;
  const auto inst = draw_instance(10000, nu_true, 0.0, 7);
  prgamp::EmConfig cfg;
  const double est = prgamp::em_update_nuw(inst.y, inst.fp, 1.0, cfg);
  CHECK(std::abs(est - nu_true) <= 0.1 * nu_true);
}

TEST_CASE("perfect single-measurement fit drives the estimate to the lower clip") {
  prgamp::BetheFixedPoint fp;
  fp.p_bar = {cd(1.3, 0.0)};
  fp.nu_p = {0.0};
  fp.z_hat = {cd(1.3, 0.0)};
  fp.nu_z = {0.0};
  const dvec y{1.3};
  prgamp::EmConfig cfg;
  const double est = prgamp::em_update_nuw(y, fp, 0.5, cfg);
  const double clip_lo = 1e-12 * 1.3 * 1.3;
  CHECK(est == doctest::Approx(clip_lo).epsilon(1e-12));
}

TEST_CASE("returned point is a local maximum and never downhill from the incumbent") {
  const auto inst = draw_instance(50, 0.5, 0.3, 99);
  prgamp::EmConfig cfg;
  for (double current : {0.02, 0.2, 2.0, 20.0}) {
    const double est = prgamp::em_update_nuw(inst.y, inst.fp, current, cfg);
    const double at_est =
        prgamp::em_log_evidence(inst.y, inst.fp.p_bar, inst.fp.nu_p, est);
    const double at_cur =
        prgamp::em_log_evidence(inst.y, inst.fp.p_bar, inst.fp.nu_p, current);
    const double at_double =
        prgamp::em_log_evidence(inst.y, inst.fp.p_bar, inst.fp.nu_p, 2.0 * est);
    const double at_half =
        prgamp::em_log_evidence(inst.y, inst.fp.p_bar, inst.fp.nu_p, 0.5 * est);
    CAPTURE(current);
    CHECK(at_est >= at_cur);
    CHECK(at_est >= at_double);
    CHECK(at_est >= at_half);
  }
}

TEST_CASE("update failure is reported when nothing on the grid is finite") {
  prgamp::BetheFixedPoint fp;
  fp.p_bar = {cd(1.0, 0.0), cd(0.5, 0.5)};
  fp.nu_p = {0.1, 0.1};
  fp.z_hat = fp.p_bar;
  fp.nu_z = {0.0, 0.0};
  const dvec bad{std::nan(""), std::nan("")};
  prgamp::EmConfig cfg;
  CHECK_THROWS_AS(prgamp::em_update_nuw(bad, fp, 1.0, cfg), prgamp::EmFailure);
}

TEST_CASE("update rejects invalid configuration") {
  const auto inst = draw_instance(10, 0.3, 0.1, 3);
  prgamp::EmConfig cfg;
  cfg.grid_points = 4;
  CHECK_THROWS_AS(prgamp::em_update_nuw(inst.y, inst.fp, 1.0, cfg), std::invalid_argument);
  cfg = prgamp::EmConfig{};
  CHECK_THROWS_AS(prgamp::em_update_nuw(inst.y, inst.fp, 0.0, cfg), std::invalid_argument);
  CHECK_THROWS_AS(prgamp::em_update_nuw(inst.y, inst.fp, -2.0, cfg), std::invalid_argument);
}

TEST_CASE("approximate center mode passes the starting point through") {
  const auto inst = draw_instance(8, 0.2, 0.3, 5);
  prgamp::RicianChannel channel(dvec(inst.y), 0.2);
  cvec start(8);
  for (std::size_t i = 0; i < 8; ++i) start[i] = cd(0.1 * double(i), -0.2);
  std::size_t fallbacks = 123;
  const cvec out =
      prgamp::solve_pbar(channel, inst.fp.z_hat, inst.fp.nu_p, start, false, &fallbacks);
  CHECK(fallbacks == 0);
  CHECK(testutil::max_abs_diff(out, start) == 0.0);
}

TEST_CASE("exact centers reproduce the tilted mean for the magnitude channel") {
  const std::size_t m = 24;
  prgamp::Rng rng(31);
  const double nu_w = 0.3;
  dvec y(m), nu_p(m);
  cvec p_true(m), z_hat(m), start(m);
  for (std::size_t i = 0; i < m; ++i) {
    y[i] = 0.3 + 2.0 * rng.uniform();
    nu_p[i] = 0.1 + 1.9 * rng.uniform();
    p_true[i] = std::polar(0.2 + 1.5 * rng.uniform(), 2.0 * M_PI * rng.uniform());
    z_hat[i] = prgamp::rician_posterior(nu_w, y[i], p_true[i], nu_p[i]).mean;
    start[i] = p_true[i] * (0.5 + rng.uniform());  // off by up to 2x in magnitude
  }
  prgamp::RicianChannel channel(dvec(y), nu_w);
  std::size_t fallbacks = 1;
  const cvec p_bar = prgamp::solve_pbar(channel, z_hat, nu_p, start, true, &fallbacks);
  CHECK(fallbacks == 0);
  for (std::size_t i = 0; i < m; ++i) {
    // defining identity: the tilted posterior mean equals z_hat
    const cd mean = prgamp::rician_posterior(nu_w, y[i], p_bar[i], nu_p[i]).mean;
    CHECK(std::abs(mean - z_hat[i]) <= 1e-7 * std::abs(z_hat[i]));
    // and the center it finds is the one the instance was built from
    CHECK(std::abs(p_bar[i] - p_true[i]) <= 1e-6 * std::abs(p_true[i]));
  }
}

TEST_CASE("exact centers collapse to the mean itself when the tilt is a point mass") {
  prgamp::RicianChannel channel(dvec{1.0, 2.0}, 0.4);
  const cvec z{cd(0.3, -0.4), cd(1.1, 0.2)};
  const dvec nu_p{0.0, 0.0};
  const cvec start{cd(9.0, 9.0), cd(-9.0, 9.0)};
  const cvec out = prgamp::solve_pbar(channel, z, nu_p, start, true);
  CHECK(testutil::max_abs_diff(out, z) <= 1e-14);
}

TEST_CASE("exact centers for the phase-oracle channel match the closed form") {
  const std::size_t m = 12;
  prgamp::Rng rng(77);
  const double nu_w = 0.15;
  cvec u(m), z_hat(m), start(m, cd{});
  dvec nu_p(m);
  for (std::size_t i = 0; i < m; ++i) {
    u[i] = rng.cgaussian();
    z_hat[i] = rng.cgaussian();
    nu_p[i] = 0.05 + rng.uniform();
  }
  prgamp::AwgnChannel channel(cvec(u), nu_w);
  const cvec p_bar = prgamp::solve_pbar(channel, z_hat, nu_p, start, true);
  for (std::size_t i = 0; i < m; ++i) {
    const cd mean = prgamp::awgn_posterior(nu_w, u[i], p_bar[i], nu_p[i]).mean;
    CHECK(std::abs(mean - z_hat[i]) <= 1e-10 * std::max(1.0, std::abs(z_hat[i])));
  }
}

TEST_CASE("channels without an exact solve fall back to the starting centers") {
  prgamp::PostIntensitySpec spec;
  spec.noise = prgamp::gaussian_noise_model(0.01);
  prgamp::PostIntensityChannel channel(dvec{1.0, 1.5}, spec);
  const cvec z{cd(1.0, 0.0), cd(1.2, 0.3)};
  const dvec nu_p{0.2, 0.2};
  const cvec start{cd(0.9, 0.1), cd(1.1, 0.2)};
  std::size_t fallbacks = 0;
  const cvec out = prgamp::solve_pbar(channel, z, nu_p, start, true, &fallbacks);
  CHECK(fallbacks == 2);
  CHECK(testutil::max_abs_diff(out, start) == 0.0);
}

}  // TEST_SUITE
