#pragma once

namespace prgamp {

// Modified-Bessel kernels for the magnitude-measurement channels.  All of the
// channel math is done with exponentially scaled Bessels so that nothing
// overflows for arguments up to 1e8 and beyond.

// I1(rho)/I0(rho), rho >= 0.  Power series below the switch point, ratio of
// asymptotic expansions above it.  Relative error <= 1e-12.
double bessel_ratio_r0(double rho);

// 1 - I1(rho)/I0(rho) without cancellation at large rho (the asymptotic
// difference series has all-positive terms).
double bessel_r0_complement(double rho);

// ln(exp(-rho) * I0(rho)), rho >= 0.  Always <= 0.
double log_i0_scaled(double rho);

// exp(-rho) * I0(rho) and exp(-rho) * I1(rho)
double i0_scaled(double rho);
double i1_scaled(double rho);

namespace bessel_detail {
// switch point between the series and asymptotic branches
inline constexpr double kSwitchRho = 20.0;
double r0_series(double rho);
double r0_asymptotic(double rho);
}  // namespace bessel_detail

}  // namespace prgamp
