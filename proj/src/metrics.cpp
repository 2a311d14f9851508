#include "prgamp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "prgamp/fft.hpp"

namespace prgamp {

namespace {

double energy(const cvec& v) {
  double e = 0.0;
  for (const auto& z : v) e += std::norm(z);
  return e;
}

// |<x, v>| with <a, b> = sum_i a_i * conj(b_i)
double abs_inner(const cvec& x, const cvec& v) {
  cd acc{};
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * std::conj(v[i]);
  return std::abs(acc);
}

// index reversal fixing position 0: out[i] = v[(-i) mod n]
cvec reverse_1d(const cvec& v) {
  const std::size_t n = v.size();
  cvec out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = v[(n - i) % n];
  return out;
}

// largest |<x_true, shift_s(v)>| over all circular shifts s, by direct scan
double best_shift_correlation_1d(const cvec& x_true, const cvec& v) {
  const std::size_t n = v.size();
  double best = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    cd acc{};
    for (std::size_t i = 0; i < n; ++i) acc += x_true[i] * std::conj(v[(i + n - s) % n]);
    best = std::max(best, std::abs(acc));
  }
  return best;
}

// per-axis index reversal on a side x side grid, each axis fixing position 0
cvec axis_flip_2d(const cvec& v, std::size_t side, bool flip_rows, bool flip_cols) {
  cvec out(v.size());
  for (std::size_t r = 0; r < side; ++r) {
    const std::size_t rr = flip_rows ? (side - r) % side : r;
    for (std::size_t c = 0; c < side; ++c) {
      const std::size_t cc = flip_cols ? (side - c) % side : c;
      out[r * side + c] = v[rr * side + cc];
    }
  }
  return out;
}

// Largest |<x_true, shift_s(v)>| over all 2-D circular shifts via the
// cross-correlation theorem.  With unitary transforms of N = side^2 points,
// corr[s] = sqrt(N) * IDFT2(DFT2(x_true) .* conj(DFT2(v)))[s].
double best_shift_correlation_2d(const cvec& x_true, const cvec& v, std::size_t side) {
  cvec fx = x_true;
  cvec fv = v;
  dft_2d(side, side, fx, false);
  dft_2d(side, side, fv, false);
  for (std::size_t k = 0; k < fx.size(); ++k) fx[k] *= std::conj(fv[k]);
  dft_2d(side, side, fx, true);
  double best = 0.0;
  for (const auto& z : fx) best = std::max(best, std::abs(z));
  return best * static_cast<double>(side);
}

}  // namespace

AmbiguitySet ambiguity_for(OperatorKind op, FieldKind field, std::size_t side) {
  if (field == FieldKind::real_field) {
    if (op == OperatorKind::dft_1d_oversampled) return {AmbiguityKind::flip_shift_1d, 0};
    if (op == OperatorKind::dft_2d) return {AmbiguityKind::flip_shift_2d, side};
  }
  return {AmbiguityKind::global_phase, 0};
}

double nmse(const cvec& x_true, const cvec& x_hat, const AmbiguitySet& amb) {
  if (x_true.size() != x_hat.size())
    throw std::invalid_argument("nmse: signals must have equal length");
  const double ref = energy(x_true);
  if (!(ref > 0.0))
    throw std::invalid_argument("nmse: reference signal must have positive energy");
  const double est = energy(x_hat);

  double best = 0.0;
  switch (amb.kind) {
    case AmbiguityKind::global_phase:
      best = abs_inner(x_true, x_hat);
      break;
    case AmbiguityKind::flip_shift_1d:
      best = std::max(best_shift_correlation_1d(x_true, x_hat),
                      best_shift_correlation_1d(x_true, reverse_1d(x_hat)));
      break;
    case AmbiguityKind::flip_shift_2d: {
      const std::size_t side = amb.side;
      if (side == 0 || side * side != x_true.size())
        throw std::invalid_argument("nmse: 2-D ambiguity set needs side*side == length");
      for (int fr = 0; fr < 2; ++fr) {
        for (int fc = 0; fc < 2; ++fc) {
          const cvec flipped = axis_flip_2d(x_hat, side, fr != 0, fc != 0);
          best = std::max(best, best_shift_correlation_2d(x_true, flipped, side));
        }
      }
      break;
    }
  }
  // All transforms preserve ||x_hat||, so minimizing the distance is
  // maximizing the correlation; the optimal-phase distance has closed form.
  return std::max(0.0, (ref + est - 2.0 * best) / ref);
}

double nmse_db(double value) { return 10.0 * std::log10(std::max(value, 1e-300)); }

bool is_success(double nmse_value, double threshold) { return nmse_value < threshold; }

double lower_median(dvec values) {
  if (values.empty()) throw std::invalid_argument("lower_median: empty sample");
  std::sort(values.begin(), values.end());
  return values[(values.size() - 1) / 2];
}

}  // namespace prgamp
