#include "prgamp/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace prgamp {

namespace {

std::mutex plan_mutex;
std::map<std::tuple<std::size_t, std::size_t, int>, fftw_plan> plan_cache;

// Plans are made once on a scratch buffer with FFTW_UNALIGNED so they can be
// re-executed on any caller array of the same shape.
fftw_plan get_plan(std::size_t rows, std::size_t cols, int sign) {
  std::lock_guard<std::mutex> lock(plan_mutex);
  const auto key = std::make_tuple(rows, cols, sign);
  auto it = plan_cache.find(key);
  if (it != plan_cache.end()) return it->second;

  const std::size_t total = rows * cols;
  fftw_complex* buf = fftw_alloc_complex(total);
  if (!buf) throw std::bad_alloc();
  fftw_plan plan =
      rows == 1
          ? fftw_plan_dft_1d(int(cols), buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED)
          : fftw_plan_dft_2d(int(rows), int(cols), buf, buf, sign,
                             FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(buf);
  if (!plan) throw std::runtime_error("fftw plan creation failed");
  plan_cache.emplace(key, plan);
  return plan;
}

void run(std::size_t rows, std::size_t cols, cvec& data, bool inverse) {
  const std::size_t total = rows * cols;
  if (data.size() != total) throw std::invalid_argument("dft: wrong buffer length");
  fftw_plan plan = get_plan(rows, cols, inverse ? FFTW_BACKWARD : FFTW_FORWARD);
  auto* raw = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, raw, raw);
  const double scale = 1.0 / std::sqrt(double(total));
  for (auto& v : data) v *= scale;
}

}  // namespace

void dft_1d(cvec& data, bool inverse) { run(1, data.size(), data, inverse); }

void dft_2d(std::size_t rows, std::size_t cols, cvec& data, bool inverse) {
  run(rows, cols, data, inverse);
}

}  // namespace prgamp
