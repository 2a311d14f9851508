#pragma once

#include <cstddef>

#include "prgamp/linops.hpp"
#include "prgamp/priors.hpp"
#include "prgamp/types.hpp"

namespace prgamp {

// Transform family the error metric minimizes over.  Every member is a
// permutation composed with a global phase, so all candidates preserve norms.
enum class AmbiguityKind {
  global_phase,   // e^{j theta} x
  flip_shift_1d,  // global phase x {identity, index reversal} x {N circular shifts}
  flip_shift_2d,  // global phase x per-axis reversals x all 2-D circular shifts
};

struct AmbiguitySet {
  AmbiguityKind kind = AmbiguityKind::global_phase;
  std::size_t side = 0;  // grid side for flip_shift_2d (signal length = side*side)
};

// The family a measurement model leaves unresolved.  Magnitude measurements
// never pin a global phase.  Plain Fourier operators acting on real-valued
// signals additionally admit index reversals and circular shifts; masked,
// blurred, and dense operators break those symmetries, leaving phase only.
AmbiguitySet ambiguity_for(OperatorKind op, FieldKind field, std::size_t side);

// min over the family of ||x_true - e^{j theta} T(x_hat)||^2 / ||x_true||^2
// with the optimal phase solved in closed form for each candidate T.
// Amplitude is never fitted: a rescaled estimate keeps a genuine error
// (nmse(x, 2x) = 1).
double nmse(const cvec& x_true, const cvec& x_hat, const AmbiguitySet& amb);

// 10 log10(value), with value floored at 1e-300 so exact zeros stay finite.
double nmse_db(double value);

// Strict comparison: a trial succeeds when its error is below the threshold.
bool is_success(double nmse_value, double threshold = 1e-6);

// Lower median: for an even count, the smaller of the two central order
// statistics.  Throws on an empty sample.
double lower_median(dvec values);

}  // namespace prgamp
