#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "prgamp/priors.hpp"

using prgamp::BernoulliGaussianPrior;
using prgamp::cd;
using prgamp::FieldKind;

namespace {

double rel_err(double got, double want) {
  return std::fabs(got - want) / std::max({std::fabs(want), std::fabs(got), 1e-300});
}

}  // namespace

TEST_SUITE("priors") {

TEST_CASE("sparse-gaussian posterior matches frozen high-precision references") {
  BernoulliGaussianPrior prior;
  prior.lambda = 0.3;
  prior.phi = 2.0;
  const auto post = prgamp::bg_posterior(prior, cd(1.2, -0.7), 0.6);
  CHECK(post.activity == doctest::Approx(0.5400947370971870291199).epsilon(1e-13));
  CHECK(std::real(post.mean) == doctest::Approx(0.498548988089711103803).epsilon(1e-13));
  CHECK(std::imag(post.mean) == doctest::Approx(-0.2908202430523314772184).epsilon(1e-13));
  CHECK(post.var == doctest::Approx(0.5329415681692445381112).epsilon(1e-13));

  BernoulliGaussianPrior rprior;
  rprior.field = FieldKind::real_field;
  rprior.lambda = 0.25;
  rprior.phi = 1.5;
  const auto rpost = prgamp::bg_posterior(rprior, cd(0.9, 0.4), 0.5);
  CHECK(rpost.activity == doctest::Approx(0.3355929693794974382257).epsilon(1e-13));
  CHECK(std::real(rpost.mean) == doctest::Approx(0.2588860049498980237741).epsilon(1e-13));
  CHECK(std::imag(rpost.mean) == 0.0);
  CHECK(rpost.var == doctest::Approx(0.2046028765551807310356).epsilon(1e-13));
}

TEST_CASE("sparse-gaussian posterior matches the quadrature oracle, circular field") {
  struct Case {
    double lambda, phi, nu_r;
    cd r;
  };
  const std::vector<Case> cases = {
      {0.05, 1.0, 0.5, cd(0.3, 0.2)},
      {0.5, 2.0, 0.1, cd(-1.5, 2.0)},
      {0.9, 0.5, 1.0, cd(0.8, -0.4)},
      {0.2, 3.0, 2.5, cd(2.0, 1.0)},
      {0.5, 1.0, 1e-3, cd(0.05, -0.02)},  // tight pseudo-measurement near zero
      {0.1, 0.5, 4.0, cd(-3.0, 0.5)},     // prior dominates a vague measurement
  };
  for (const auto& c : cases) {
    CAPTURE(c.lambda);
    CAPTURE(c.phi);
    CAPTURE(c.nu_r);
    BernoulliGaussianPrior prior;
    prior.lambda = c.lambda;
    prior.phi = c.phi;
    const auto got = prgamp::bg_posterior(prior, c.r, c.nu_r);
    const auto ref = testutil::bg_oracle(prior, c.r, c.nu_r, 2048);
    CHECK(std::abs(got.mean - ref.mean) <=
          1e-6 * std::max({std::abs(ref.mean), std::sqrt(ref.var), 1e-12}));
    CHECK(rel_err(got.var, ref.var) <= 2e-6);
    CHECK(rel_err(got.activity, ref.activity) <= 2e-6);
  }
}

TEST_CASE("sparse-gaussian posterior matches the quadrature oracle, real field") {
  struct Case {
    double lambda, phi, nu_r;
    cd r;
  };
  const std::vector<Case> cases = {
      {0.1, 1.0, 0.4, cd(0.7, 0.3)},
      {0.6, 2.5, 0.05, cd(-1.1, -0.8)},
      {0.35, 0.8, 1.5, cd(2.2, 0.0)},
  };
  for (const auto& c : cases) {
    CAPTURE(c.lambda);
    CAPTURE(c.nu_r);
    BernoulliGaussianPrior prior;
    prior.field = FieldKind::real_field;
    prior.lambda = c.lambda;
    prior.phi = c.phi;
    const auto got = prgamp::bg_posterior(prior, c.r, c.nu_r);
    const auto ref = testutil::bg_oracle(prior, c.r, c.nu_r, 8192);
    CHECK(std::imag(got.mean) == 0.0);
    CHECK(std::abs(got.mean - ref.mean) <=
          1e-8 * std::max({std::abs(ref.mean), std::sqrt(ref.var), 1e-12}));
    CHECK(rel_err(got.var, ref.var) <= 1e-8);
    CHECK(rel_err(got.activity, ref.activity) <= 1e-8);
  }
}

TEST_CASE("sparse-gaussian posterior limits and structure") {
  BernoulliGaussianPrior prior;
  prior.lambda = 1.0;
  prior.phi = 2.0;
  const cd r(1.0, -0.5);
  const double nu_r = 0.4;
  auto post = prgamp::bg_posterior(prior, r, nu_r);
  // always-active limit: plain product of two circular gaussians
  const double shrink = prior.phi / (prior.phi + nu_r);
  CHECK(std::abs(post.mean - r * shrink) <= 1e-15);
  CHECK(post.var == doctest::Approx(nu_r * shrink).epsilon(1e-14));
  CHECK(post.activity == 1.0);

  prior.lambda = 0.0;
  post = prgamp::bg_posterior(prior, r, nu_r);
  CHECK(post.mean == cd(0.0, 0.0));
  CHECK(post.var == 0.0);
  CHECK(post.activity == 0.0);

  // the estimate is a shrunken copy of the pseudo-measurement, never amplified
  prior.lambda = 0.37;
  post = prgamp::bg_posterior(prior, r, nu_r);
  const cd ratio = post.mean / r;
  CHECK(std::imag(ratio) == doctest::Approx(0.0));
  CHECK(std::real(ratio) > 0.0);
  CHECK(std::real(ratio) < 1.0);
  CHECK(post.activity > 0.0);
  CHECK(post.activity < 1.0);

  // activity depends on the measurement only through its magnitude
  const auto rot = prgamp::bg_posterior(prior, r * std::polar(1.0, 1.9), nu_r);
  CHECK(rot.activity == doctest::Approx(post.activity).epsilon(1e-13));
  CHECK(rot.var == doctest::Approx(post.var).epsilon(1e-13));
}

TEST_CASE("sparse-gaussian posterior rejects invalid arguments") {
  BernoulliGaussianPrior prior;
  CHECK_THROWS_AS(prgamp::bg_posterior(prior, cd(1, 0), 0.0), std::invalid_argument);
  prior.lambda = -0.1;
  CHECK_THROWS_AS(prgamp::bg_posterior(prior, cd(1, 0), 1.0), std::invalid_argument);
  prior.lambda = 0.5;
  prior.phi = 0.0;
  CHECK_THROWS_AS(prgamp::bg_posterior(prior, cd(1, 0), 1.0), std::invalid_argument);
}

TEST_CASE("prior sampling has the declared sparsity and power") {
  BernoulliGaussianPrior prior;
  prior.lambda = 0.1;
  prior.phi = 2.0;
  const std::size_t n = 200000;
  const auto x = prgamp::draw_prior_sample(prior, n, 424242);
  REQUIRE(x.size() == n);
  std::size_t active = 0;
  double power = 0.0;
  for (const auto& v : x) {
    if (v != cd(0.0, 0.0)) ++active;
    power += std::norm(v);
  }
  CHECK(std::fabs(double(active) / n - prior.lambda) < 3e-3);
  CHECK(std::fabs(power / n - prior.lambda * prior.phi) < 0.012);

  // determinism and seed sensitivity
  const auto again = prgamp::draw_prior_sample(prior, n, 424242);
  CHECK(x == again);
  const auto other = prgamp::draw_prior_sample(prior, n, 424243);
  CHECK(x != other);

  BernoulliGaussianPrior rprior;
  rprior.field = FieldKind::real_field;
  rprior.lambda = 0.3;
  rprior.phi = 1.0;
  const auto xr = prgamp::draw_prior_sample(rprior, n, 7);
  double rpower = 0.0;
  for (const auto& v : xr) {
    CHECK(std::imag(v) == 0.0);
    rpower += std::norm(v);
  }
  CHECK(std::fabs(rpower / n - rprior.lambda * rprior.phi) < 0.01);
}

TEST_CASE("energy-matched active variance estimate") {
  // ||y||^2 = 5, M = 2: phi = (5 - 2*0.5) / (0.25 * 8) = 2
  const prgamp::dvec y = {1.0, 2.0};
  CHECK(prgamp::estimate_phi(y, 0.5, 0.25, 8.0) == doctest::Approx(2.0).epsilon(1e-14));
  // noise energy exceeding the measurement energy hits the floor
  CHECK(prgamp::estimate_phi(y, 10.0, 0.25, 8.0) == doctest::Approx(1e-12));
  CHECK_THROWS_AS(prgamp::estimate_phi(y, 0.5, 0.0, 8.0), std::invalid_argument);
  CHECK_THROWS_AS(prgamp::estimate_phi(y, 0.5, 0.25, 0.0), std::invalid_argument);
}

}  // TEST_SUITE
