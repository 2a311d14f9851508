#include "prgamp/linops.hpp"

#include <algorithm>
#include <cmath>

#include "prgamp/fft.hpp"
#include "prgamp/rng.hpp"

namespace prgamp {

std::string kind_name(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::dense_complex: return "dense-complex";
    case OperatorKind::dense_times_dft: return "dense-times-dft";
    case OperatorKind::dft_1d_oversampled: return "dft-1d-oversampled";
    case OperatorKind::dft_2d: return "dft-2d";
    case OperatorKind::masked_fourier: return "masked-fourier";
    case OperatorKind::blurred_masked_fourier: return "blurred-masked-fourier";
  }
  throw std::logic_error("unknown operator kind");
}

OperatorKind kind_from_name(const std::string& name) {
  for (OperatorKind k :
       {OperatorKind::dense_complex, OperatorKind::dense_times_dft,
        OperatorKind::dft_1d_oversampled, OperatorKind::dft_2d,
        OperatorKind::masked_fourier, OperatorKind::blurred_masked_fourier}) {
    if (kind_name(k) == name) return k;
  }
  throw std::invalid_argument("unknown operator kind: " + name);
}

void MeasurementOperator::check_forward_sizes(std::size_t in, cvec& out) const {
  if (in != n_) throw std::invalid_argument("forward: input length != N");
  out.assign(m_, cd{});
}

void MeasurementOperator::check_adjoint_sizes(std::size_t in, cvec& out) const {
  if (in != m_) throw std::invalid_argument("adjoint: input length != M");
  out.assign(n_, cd{});
}

void MeasurementOperator::abs_sq_forward(const dvec&, dvec&) const {
  throw UnsupportedOperation(kind_name(kind_) +
                             " operator has no entrywise |a|^2 apply; use uniform-variance mode");
}

void MeasurementOperator::abs_sq_adjoint(const dvec&, dvec&) const {
  throw UnsupportedOperation(kind_name(kind_) +
                             " operator has no entrywise |a|^2 apply; use uniform-variance mode");
}

// ---- dense ----

DenseOperator::DenseOperator(std::size_t m, std::size_t n, cvec entries, OperatorKind kind)
    : MeasurementOperator(m, n, kind), a_(std::move(entries)) {
  if (a_.size() != m * n) throw std::invalid_argument("dense operator: entry count != M*N");
  double fs = 0.0;
  for (const cd& v : a_) fs += std::norm(v);
  frob_sq_ = fs;
}

void DenseOperator::forward(const cvec& x, cvec& out) const {
  check_forward_sizes(x.size(), out);
  for (std::size_t m = 0; m < m_; ++m) {
    const cd* row = a_.data() + m * n_;
    cd acc{};
    for (std::size_t n = 0; n < n_; ++n) acc += row[n] * x[n];
    out[m] = acc;
  }
}

void DenseOperator::adjoint(const cvec& u, cvec& out) const {
  check_adjoint_sizes(u.size(), out);
  for (std::size_t m = 0; m < m_; ++m) {
    const cd* row = a_.data() + m * n_;
    const cd um = u[m];
    for (std::size_t n = 0; n < n_; ++n) out[n] += std::conj(row[n]) * um;
  }
}

void DenseOperator::abs_sq_forward(const dvec& v, dvec& out) const {
  if (v.size() != n_) throw std::invalid_argument("abs_sq_forward: input length != N");
  out.assign(m_, 0.0);
  for (std::size_t m = 0; m < m_; ++m) {
    const cd* row = a_.data() + m * n_;
    double acc = 0.0;
    for (std::size_t n = 0; n < n_; ++n) acc += std::norm(row[n]) * v[n];
    out[m] = acc;
  }
}

void DenseOperator::abs_sq_adjoint(const dvec& v, dvec& out) const {
  if (v.size() != m_) throw std::invalid_argument("abs_sq_adjoint: input length != M");
  out.assign(n_, 0.0);
  for (std::size_t m = 0; m < m_; ++m) {
    const cd* row = a_.data() + m * n_;
    const double vm = v[m];
    for (std::size_t n = 0; n < n_; ++n) out[n] += std::norm(row[n]) * vm;
  }
}

// ---- oversampled 1-D DFT ----

OversampledDft1dOperator::OversampledDft1dOperator(std::size_t n)
    : MeasurementOperator(2 * n, n, OperatorKind::dft_1d_oversampled) {
  if (n == 0) throw std::invalid_argument("oversampled dft: N must be positive");
  // columns of the unitary M-point DFT have unit norm
  frob_sq_ = double(n);
}

void OversampledDft1dOperator::forward(const cvec& x, cvec& out) const {
  check_forward_sizes(x.size(), out);
  std::copy(x.begin(), x.end(), out.begin());
  dft_1d(out, false);
}

void OversampledDft1dOperator::adjoint(const cvec& u, cvec& out) const {
  check_adjoint_sizes(u.size(), out);
  cvec tmp = u;
  dft_1d(tmp, true);
  std::copy(tmp.begin(), tmp.begin() + n_, out.begin());
}

// ---- 2-D DFT ----

Dft2dOperator::Dft2dOperator(std::size_t side)
    : MeasurementOperator(side * side, side * side, OperatorKind::dft_2d), side_(side) {
  if (side == 0) throw std::invalid_argument("dft-2d: side must be positive");
  frob_sq_ = double(n_);
}

void Dft2dOperator::forward(const cvec& x, cvec& out) const {
  check_forward_sizes(x.size(), out);
  out = x;
  dft_2d(side_, side_, out, false);
}

void Dft2dOperator::adjoint(const cvec& u, cvec& out) const {
  check_adjoint_sizes(u.size(), out);
  out = u;
  dft_2d(side_, side_, out, true);
}

// ---- masked Fourier, four blocks ----

MaskedFourierOperator::MaskedFourierOperator(std::size_t side, std::size_t m,
                                             std::uint64_t seed)
    : MeasurementOperator(m, side * side, OperatorKind::masked_fourier), side_(side) {
  if (side == 0) throw std::invalid_argument("masked fourier: side must be positive");
  if (m == 0 || m % kBlocks != 0)
    throw std::invalid_argument("masked fourier: M must be a positive multiple of 4");
  const std::size_t per_block = m / kBlocks;
  if (per_block > n_)
    throw std::invalid_argument("masked fourier: M/4 distinct rows need M/4 <= N");

  Rng rng(seed);
  masks_.resize(kBlocks);
  selectors_.resize(kBlocks);
  // The four masks form two complementary pairs (blocks 0/1 and 2/3), so every
  // coefficient is kept by exactly two of the four masks.  Independent masks
  // would leave each coefficient completely unmasked with probability 1/16 --
  // a zero column of the operator, and an unrecoverable coefficient.
  for (std::size_t b = 0; b < kBlocks; b += 2) {
    masks_[b].resize(n_);
    masks_[b + 1].resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      masks_[b][i] = std::uint8_t(rng.next_u64() & 1u);
      masks_[b + 1][i] = std::uint8_t(1u - masks_[b][i]);
    }
  }
  double fs = 0.0;
  for (std::size_t b = 0; b < kBlocks; ++b) {
    std::size_t ones = 0;
    for (std::size_t i = 0; i < n_; ++i) ones += masks_[b][i];
    selectors_[b] = rng.sample_without_replacement(n_, per_block);
    // each selected DFT row restricted to the mask support has norm ones/N
    fs += double(per_block) * double(ones) / double(n_);
  }
  frob_sq_ = fs;
}

const std::vector<std::uint8_t>& MaskedFourierOperator::mask(std::size_t block) const {
  return masks_.at(block);
}

const std::vector<std::size_t>& MaskedFourierOperator::selector(std::size_t block) const {
  return selectors_.at(block);
}

void MaskedFourierOperator::forward(const cvec& x, cvec& out) const {
  check_forward_sizes(x.size(), out);
  const std::size_t per_block = m_ / kBlocks;
  cvec work(n_);
  for (std::size_t b = 0; b < kBlocks; ++b) {
    for (std::size_t i = 0; i < n_; ++i) work[i] = masks_[b][i] ? x[i] : cd{};
    dft_2d(side_, side_, work, false);
    for (std::size_t r = 0; r < per_block; ++r)
      out[b * per_block + r] = work[selectors_[b][r]];
  }
}

void MaskedFourierOperator::adjoint(const cvec& u, cvec& out) const {
  check_adjoint_sizes(u.size(), out);
  const std::size_t per_block = m_ / kBlocks;
  cvec work(n_);
  for (std::size_t b = 0; b < kBlocks; ++b) {
    std::fill(work.begin(), work.end(), cd{});
    for (std::size_t r = 0; r < per_block; ++r)
      work[selectors_[b][r]] = u[b * per_block + r];
    dft_2d(side_, side_, work, true);
    for (std::size_t i = 0; i < n_; ++i)
      if (masks_[b][i]) out[i] += work[i];
  }
}

// ---- blurred masked Fourier, two blocks ----

BlurredMaskedFourierOperator::BlurredMaskedFourierOperator(std::size_t side, std::size_t m,
                                                           std::uint64_t seed)
    : MeasurementOperator(m, side * side, OperatorKind::blurred_masked_fourier),
      side_(side) {
  if (side == 0) throw std::invalid_argument("blurred masked fourier: side must be positive");
  if (m == 0 || m % kBlocks != 0)
    throw std::invalid_argument("blurred masked fourier: M must be a positive even number");
  if (m / kBlocks < kBand)
    throw std::invalid_argument("blurred masked fourier: M/2 must be at least the band width");
  if (n_ % 2 != 0)
    throw std::invalid_argument("blurred masked fourier: N must be even for complementary masks");

  Rng rng(seed);
  masks_.resize(kBlocks);
  masks_[0].assign(n_, 0);
  for (std::size_t idx : rng.sample_without_replacement(n_, n_ / 2)) masks_[0][idx] = 1;
  masks_[1].resize(n_);
  for (std::size_t i = 0; i < n_; ++i) masks_[1][i] = masks_[0][i] ? 0 : 1;

  bands_.resize(kBlocks);
  for (std::size_t b = 0; b < kBlocks; ++b) {
    bands_[b].resize(n_ * kBand);
    for (std::size_t i = 0; i < n_ * kBand; ++i) bands_[b][i] = rng.cgaussian();
  }
  frob_sq_ = block_frobenius_sq(0) + block_frobenius_sq(1);
}

const std::vector<std::uint8_t>& BlurredMaskedFourierOperator::mask(std::size_t block) const {
  return masks_.at(block);
}

const cvec& BlurredMaskedFourierOperator::band(std::size_t block) const {
  return bands_.at(block);
}

// ||B F D||_F^2 = sum_r || D . (F^H b_r) ||^2 over the rows b_r of B,
// computed with one inverse transform per row.
double BlurredMaskedFourierOperator::block_frobenius_sq(std::size_t block) const {
  const std::size_t half = m_ / kBlocks;
  const cvec& bv = bands_[block];
  cvec row(n_);
  double fs = 0.0;
  for (std::size_t r = 0; r < half; ++r) {
    std::fill(row.begin(), row.end(), cd{});
    // columns hitting row r: n with (n + d) mod half == r, d in [0, kBand)
    for (std::size_t d = 0; d < kBand; ++d) {
      const std::size_t base = (r + half - d) % half;
      for (std::size_t n = base; n < n_; n += half) row[n] += std::conj(bv[n * kBand + d]);
    }
    dft_2d(side_, side_, row, true);
    for (std::size_t i = 0; i < n_; ++i)
      if (masks_[block][i]) fs += std::norm(row[i]);
  }
  return fs;
}

void BlurredMaskedFourierOperator::forward(const cvec& x, cvec& out) const {
  check_forward_sizes(x.size(), out);
  const std::size_t half = m_ / kBlocks;
  cvec work(n_);
  for (std::size_t b = 0; b < kBlocks; ++b) {
    for (std::size_t i = 0; i < n_; ++i) work[i] = masks_[b][i] ? x[i] : cd{};
    dft_2d(side_, side_, work, false);
    const cvec& bv = bands_[b];
    for (std::size_t n = 0; n < n_; ++n) {
      const cd t = work[n];
      for (std::size_t d = 0; d < kBand; ++d)
        out[b * half + (n + d) % half] += bv[n * kBand + d] * t;
    }
  }
}

void BlurredMaskedFourierOperator::adjoint(const cvec& u, cvec& out) const {
  check_adjoint_sizes(u.size(), out);
  const std::size_t half = m_ / kBlocks;
  cvec work(n_);
  for (std::size_t b = 0; b < kBlocks; ++b) {
    const cvec& bv = bands_[b];
    for (std::size_t n = 0; n < n_; ++n) {
      cd acc{};
      for (std::size_t d = 0; d < kBand; ++d)
        acc += std::conj(bv[n * kBand + d]) * u[b * half + (n + d) % half];
      work[n] = acc;
    }
    dft_2d(side_, side_, work, true);
    for (std::size_t i = 0; i < n_; ++i)
      if (masks_[b][i]) out[i] += work[i];
  }
}

// ---- builders ----

std::unique_ptr<MeasurementOperator> build_dense_gaussian(std::size_t m, std::size_t n,
                                                          std::uint64_t seed) {
  if (m == 0 || n == 0) throw std::invalid_argument("dense operator: M and N must be positive");
  Rng rng(seed);
  cvec a(m * n);
  for (cd& v : a) v = rng.cgaussian();
  return std::make_unique<DenseOperator>(m, n, std::move(a));
}

std::unique_ptr<MeasurementOperator> build_phi_f(std::size_t m, std::size_t n,
                                                 std::uint64_t seed) {
  if (m == 0 || n == 0) throw std::invalid_argument("phi-f operator: M and N must be positive");
  Rng rng(seed);
  cvec a(m * n);
  for (cd& v : a) v = rng.cgaussian();
  // right-multiplying by the unitary DFT transforms each row
  cvec row(n);
  for (std::size_t r = 0; r < m; ++r) {
    std::copy(a.begin() + r * n, a.begin() + (r + 1) * n, row.begin());
    dft_1d(row, false);
    std::copy(row.begin(), row.end(), a.begin() + r * n);
  }
  return std::make_unique<DenseOperator>(m, n, std::move(a), OperatorKind::dense_times_dft);
}

std::unique_ptr<MeasurementOperator> build_oversampled_dft_1d(std::size_t n) {
  return std::make_unique<OversampledDft1dOperator>(n);
}

std::unique_ptr<MeasurementOperator> build_dft_2d(std::size_t side) {
  return std::make_unique<Dft2dOperator>(side);
}

std::unique_ptr<MeasurementOperator> build_masked_fourier(std::size_t side, std::size_t m,
                                                          std::uint64_t seed) {
  return std::make_unique<MaskedFourierOperator>(side, m, seed);
}

std::unique_ptr<MeasurementOperator> build_blurred_masked_fourier(std::size_t side,
                                                                  std::size_t m,
                                                                  std::uint64_t seed) {
  return std::make_unique<BlurredMaskedFourierOperator>(side, m, seed);
}

std::unique_ptr<MeasurementOperator> build_operator(const OperatorConfig& cfg) {
  switch (cfg.kind) {
    case OperatorKind::dense_complex: return build_dense_gaussian(cfg.m, cfg.n, cfg.seed);
    case OperatorKind::dense_times_dft: return build_phi_f(cfg.m, cfg.n, cfg.seed);
    case OperatorKind::dft_1d_oversampled: return build_oversampled_dft_1d(cfg.n);
    case OperatorKind::dft_2d: return build_dft_2d(cfg.side);
    case OperatorKind::masked_fourier: return build_masked_fourier(cfg.side, cfg.m, cfg.seed);
    case OperatorKind::blurred_masked_fourier:
      return build_blurred_masked_fourier(cfg.side, cfg.m, cfg.seed);
  }
  throw std::logic_error("unknown operator kind");
}

}  // namespace prgamp
