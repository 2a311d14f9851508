#pragma once

#include <cmath>
#include <cstdint>

#include "prgamp/linops.hpp"
#include "prgamp/rng.hpp"
#include "prgamp/types.hpp"

namespace testutil {

using prgamp::cd;
using prgamp::cvec;
using prgamp::dvec;

// dense row-major M*N copy of an operator, column by column
inline cvec materialize(const prgamp::MeasurementOperator& op) {
  const std::size_t m = op.rows(), n = op.cols();
  cvec a(m * n);
  cvec e(n), col;
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(e.begin(), e.end(), cd{});
    e[j] = 1.0;
    op.forward(e, col);
    for (std::size_t i = 0; i < m; ++i) a[i * n + j] = col[i];
  }
  return a;
}

inline cvec dense_mul(const cvec& a, std::size_t m, std::size_t n, const cvec& x) {
  cvec y(m);
  for (std::size_t i = 0; i < m; ++i) {
    cd acc{};
    for (std::size_t j = 0; j < n; ++j) acc += a[i * n + j] * x[j];
    y[i] = acc;
  }
  return y;
}

// direct O(L^2) unitary DFT, the oracle for the FFT wrapper
inline cvec direct_dft_1d(const cvec& x, bool inverse) {
  const std::size_t l = x.size();
  cvec y(l);
  const double sgn = inverse ? 1.0 : -1.0;
  for (std::size_t k = 0; k < l; ++k) {
    cd acc{};
    for (std::size_t t = 0; t < l; ++t) {
      const double ang = sgn * 2.0 * M_PI * double(k * t % l) / double(l);
      acc += x[t] * cd(std::cos(ang), std::sin(ang));
    }
    y[k] = acc / std::sqrt(double(l));
  }
  return y;
}

inline cvec direct_dft_2d(const cvec& x, std::size_t rows, std::size_t cols, bool inverse) {
  const double sgn = inverse ? 1.0 : -1.0;
  cvec y(rows * cols);
  for (std::size_t kr = 0; kr < rows; ++kr)
    for (std::size_t kc = 0; kc < cols; ++kc) {
      cd acc{};
      for (std::size_t tr = 0; tr < rows; ++tr)
        for (std::size_t tc = 0; tc < cols; ++tc) {
          const double ang = sgn * 2.0 * M_PI *
                             (double(kr * tr) / double(rows) + double(kc * tc) / double(cols));
          acc += x[tr * cols + tc] * cd(std::cos(ang), std::sin(ang));
        }
      y[kr * cols + kc] = acc / std::sqrt(double(rows * cols));
    }
  return y;
}

inline cvec random_cvec(std::size_t n, std::uint64_t seed) {
  prgamp::Rng rng(seed);
  cvec v(n);
  for (cd& z : v) z = rng.cgaussian();
  return v;
}

inline cd inner(const cvec& a, const cvec& b) {
  cd acc{};
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

inline double max_abs_diff(const cvec& a, const cvec& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace testutil
