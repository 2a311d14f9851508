#include "prgamp/bessel.hpp"

#include <cmath>
#include <stdexcept>

namespace prgamp {

namespace {

void check_domain(double rho) {
  if (!(rho >= 0.0)) throw std::invalid_argument("bessel kernel: rho must be >= 0");
}

// I0 and I1 by their ascending series, valid and overflow-free for rho <= 20.
// t0_k = (rho/2)^(2k)/(k!)^2, t1_k = (rho/2)^(2k)/(k!(k+1)!)
void i01_series(double rho, double& i0, double& i1_over_half_rho) {
  const double q = 0.25 * rho * rho;
  double t0 = 1.0, t1 = 1.0;
  double s0 = 1.0, s1 = 1.0;
  for (int k = 1; k < 80; ++k) {
    t0 *= q / (double(k) * k);
    t1 *= q / (double(k) * (k + 1));
    s0 += t0;
    s1 += t1;
    if (t0 < 1e-18 * s0 && t1 < 1e-18 * s1) break;
  }
  i0 = s0;
  i1_over_half_rho = s1;
}

// Sums of the large-argument expansions
//   I0(x) ~ e^x/sqrt(2 pi x) * sum_k A_k x^-k,   A_k = ((2k-1)!!)^2/(k! 8^k)
//   I1(x) ~ e^x/sqrt(2 pi x) * sum_k B_k x^-k,   B_k = B_{k-1}(2k-3)(2k+1)/(8k)
// and of the difference D_k = A_k - B_k (all D_k positive, so the complement
// 1 - I1/I0 = (sum D)/(sum A) has no cancellation).  Terms are added until
// they stop mattering or start growing (optimal truncation).
struct AsymSums {
  double a, b, d;
};

AsymSums asym_sums(double x) {
  double ak = 1.0, bk = 1.0;
  double sa = 1.0, sb = 1.0, sd = 0.0;
  double prev = HUGE_VAL;
  for (int k = 1; k < 60; ++k) {
    ak *= double(2 * k - 1) * (2 * k - 1) / (8.0 * k);
    bk *= double(2 * k - 3) * (2 * k + 1) / (8.0 * k);
    const double xk = std::pow(x, double(-k));
    const double ta = ak * xk, tb = bk * xk;
    const double mag = std::fabs(ta) + std::fabs(tb);
    if (mag > prev) break;  // past the smallest term of the divergent tail
    prev = mag;
    sa += ta;
    sb += tb;
    sd += ta - tb;
    if (mag < 1e-18 * sa) break;
  }
  return {sa, sb, sd};
}

}  // namespace

namespace bessel_detail {

double r0_series(double rho) {
  double i0, i1h;
  i01_series(rho, i0, i1h);
  return 0.5 * rho * i1h / i0;
}

double r0_asymptotic(double rho) {
  const AsymSums s = asym_sums(rho);
  return s.b / s.a;
}

}  // namespace bessel_detail

double bessel_ratio_r0(double rho) {
  check_domain(rho);
  if (rho <= bessel_detail::kSwitchRho) return bessel_detail::r0_series(rho);
  return bessel_detail::r0_asymptotic(rho);
}

double bessel_r0_complement(double rho) {
  check_domain(rho);
  if (rho <= bessel_detail::kSwitchRho) return 1.0 - bessel_detail::r0_series(rho);
  const AsymSums s = asym_sums(rho);
  return s.d / s.a;
}

double log_i0_scaled(double rho) {
  check_domain(rho);
  if (rho <= bessel_detail::kSwitchRho) {
    double i0, i1h;
    i01_series(rho, i0, i1h);
    return std::log(i0) - rho;
  }
  const AsymSums s = asym_sums(rho);
  return std::log(s.a) - 0.5 * std::log(6.283185307179586476925287 * rho);
}

double i0_scaled(double rho) { return std::exp(log_i0_scaled(rho)); }

double i1_scaled(double rho) { return bessel_ratio_r0(rho) * i0_scaled(rho); }

}  // namespace prgamp
