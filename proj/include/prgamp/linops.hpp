#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>

#include "prgamp/types.hpp"

namespace prgamp {

// Measurement operators.  All are immutable after construction and safe to
// share across threads; FFT-backed kinds allocate their scratch per call.
enum class OperatorKind {
  dense_complex,
  dense_times_dft,
  dft_1d_oversampled,
  dft_2d,
  masked_fourier,
  blurred_masked_fourier,
};

std::string kind_name(OperatorKind kind);
OperatorKind kind_from_name(const std::string& name);

struct UnsupportedOperation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class MeasurementOperator {
 public:
  virtual ~MeasurementOperator() = default;

  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }
  OperatorKind kind() const { return kind_; }
  double frobenius_sq() const { return frob_sq_; }

  // entrywise |a_mn|^2 multiply; kinds without it run in uniform-variance mode
  virtual bool supports_abs_sq() const { return false; }

  virtual void forward(const cvec& x, cvec& out) const = 0;
  virtual void adjoint(const cvec& u, cvec& out) const = 0;
  virtual void abs_sq_forward(const dvec& v, dvec& out) const;
  virtual void abs_sq_adjoint(const dvec& v, dvec& out) const;

  // allocating conveniences over the virtuals above
  cvec forward(const cvec& x) const {
    cvec out;
    forward(x, out);
    return out;
  }
  cvec adjoint(const cvec& u) const {
    cvec out;
    adjoint(u, out);
    return out;
  }
  dvec abs_sq_forward(const dvec& v) const {
    dvec out;
    abs_sq_forward(v, out);
    return out;
  }
  dvec abs_sq_adjoint(const dvec& v) const {
    dvec out;
    abs_sq_adjoint(v, out);
    return out;
  }

 protected:
  MeasurementOperator(std::size_t m, std::size_t n, OperatorKind kind)
      : m_(m), n_(n), kind_(kind) {}
  void check_forward_sizes(std::size_t in, cvec& out) const;
  void check_adjoint_sizes(std::size_t in, cvec& out) const;

  std::size_t m_, n_;
  OperatorKind kind_;
  double frob_sq_ = 0.0;
};

// Explicit row-major matrix; also used for the dense-times-DFT product,
// which is materialized at construction.
class DenseOperator : public MeasurementOperator {
 public:
  DenseOperator(std::size_t m, std::size_t n, cvec entries,
                OperatorKind kind = OperatorKind::dense_complex);

  bool supports_abs_sq() const override { return true; }
  void forward(const cvec& x, cvec& out) const override;
  void adjoint(const cvec& u, cvec& out) const override;
  void abs_sq_forward(const dvec& v, dvec& out) const override;
  void abs_sq_adjoint(const dvec& v, dvec& out) const override;

  const cvec& entries() const { return a_; }

 private:
  cvec a_;
};

// y = unitary M-point DFT of x zero-padded from N to M
class OversampledDft1dOperator : public MeasurementOperator {
 public:
  explicit OversampledDft1dOperator(std::size_t n);
  void forward(const cvec& x, cvec& out) const override;
  void adjoint(const cvec& u, cvec& out) const override;
};

class Dft2dOperator : public MeasurementOperator {
 public:
  explicit Dft2dOperator(std::size_t side);
  std::size_t side() const { return side_; }
  void forward(const cvec& x, cvec& out) const override;
  void adjoint(const cvec& u, cvec& out) const override;

 private:
  std::size_t side_;
};

// Four blocks of (row selector) * (2-D unitary DFT) * (0/1 diagonal mask)
class MaskedFourierOperator : public MeasurementOperator {
 public:
  MaskedFourierOperator(std::size_t side, std::size_t m, std::uint64_t seed);

  std::size_t side() const { return side_; }
  static constexpr std::size_t kBlocks = 4;
  const std::vector<std::uint8_t>& mask(std::size_t block) const;
  const std::vector<std::size_t>& selector(std::size_t block) const;

  void forward(const cvec& x, cvec& out) const override;
  void adjoint(const cvec& u, cvec& out) const override;

 private:
  std::size_t side_;
  std::vector<std::vector<std::uint8_t>> masks_;
  std::vector<std::vector<std::size_t>> selectors_;
};

// Two blocks of (banded blur) * (2-D unitary DFT) * (complementary 0/1 masks);
// each blur column has kBand i.i.d circular-Gaussian entries starting at the
// column index mod M/2, wrapped cyclically.
class BlurredMaskedFourierOperator : public MeasurementOperator {
 public:
  BlurredMaskedFourierOperator(std::size_t side, std::size_t m, std::uint64_t seed);

  std::size_t side() const { return side_; }
  static constexpr std::size_t kBlocks = 2;
  static constexpr std::size_t kBand = 10;
  const std::vector<std::uint8_t>& mask(std::size_t block) const;
  // band values for one block, column-major: kBand entries per column
  const cvec& band(std::size_t block) const;

  void forward(const cvec& x, cvec& out) const override;
  void adjoint(const cvec& u, cvec& out) const override;

 private:
  double block_frobenius_sq(std::size_t block) const;

  std::size_t side_;
  std::vector<std::vector<std::uint8_t>> masks_;
  std::vector<cvec> bands_;
};

std::unique_ptr<MeasurementOperator> build_dense_gaussian(std::size_t m, std::size_t n,
                                                          std::uint64_t seed);
std::unique_ptr<MeasurementOperator> build_phi_f(std::size_t m, std::size_t n,
                                                 std::uint64_t seed);
std::unique_ptr<MeasurementOperator> build_oversampled_dft_1d(std::size_t n);
std::unique_ptr<MeasurementOperator> build_dft_2d(std::size_t side);
std::unique_ptr<MeasurementOperator> build_masked_fourier(std::size_t side, std::size_t m,
                                                          std::uint64_t seed);
std::unique_ptr<MeasurementOperator> build_blurred_masked_fourier(std::size_t side,
                                                                  std::size_t m,
                                                                  std::uint64_t seed);

// Everything needed to rebuild an operator deterministically; what the
// harness writes into / reads from config files.
struct OperatorConfig {
  OperatorKind kind = OperatorKind::dense_complex;
  std::size_t m = 0;     // measurements (ignored for kinds with fixed M)
  std::size_t n = 0;     // signal length (dense kinds)
  std::size_t side = 0;  // image side (2-D kinds)
  std::uint64_t seed = 0;
};

std::unique_ptr<MeasurementOperator> build_operator(const OperatorConfig& cfg);

}  // namespace prgamp
