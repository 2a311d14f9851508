#pragma once

#include <complex>
#include <vector>

namespace prgamp {

using cd = std::complex<double>;
using cvec = std::vector<cd>;
using dvec = std::vector<double>;

}  // namespace prgamp
