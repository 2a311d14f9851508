#pragma once

#include <cstddef>

#include "prgamp/types.hpp"

namespace prgamp {

// Unitary DFTs backed by FFTW.  Plans are cached per (shape, direction) and
// created behind a global mutex; execution is safe to call concurrently with
// distinct buffers.  forward applies exp(-2*pi*i*k*n/L)/sqrt(L).
void dft_1d(cvec& data, bool inverse);
void dft_2d(std::size_t rows, std::size_t cols, cvec& data, bool inverse);

}  // namespace prgamp
