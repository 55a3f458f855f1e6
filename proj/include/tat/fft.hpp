#pragma once

#include <complex>

#include <fftw3.h>

namespace tat {

using cplx = std::complex<double>;

/// Thread count used by every plan created afterwards (default 1).
void set_fft_threads(int n);
int fft_threads();

/// Move-only owner of an fftw_plan. Creation and destruction go through a
/// global lock because the FFTW planner is not reentrant; execution is not
/// locked and uses the new-array interface, so one plan can serve many
/// callers with their own buffers.
class FftPlan {
 public:
  FftPlan() = default;
  explicit FftPlan(fftw_plan p) : p_(p) {}
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  FftPlan(FftPlan&& o) noexcept : p_(o.p_) { o.p_ = nullptr; }
  FftPlan& operator=(FftPlan&& o) noexcept;
  ~FftPlan();

  fftw_plan get() const { return p_; }
  explicit operator bool() const { return p_ != nullptr; }

 private:
  fftw_plan p_ = nullptr;
};

/// Unnormalized real 2-D transform of an N×N row-major array; the half
/// spectrum has N rows of N/2+1 entries.
class Fft2D {
 public:
  Fft2D() = default;
  explicit Fft2D(int n);

  int n() const { return n_; }
  int half() const { return n_ / 2 + 1; }
  void forward(const double* in, cplx* out) const;
  /// Clobbers `in`.
  void inverse(cplx* in, double* out) const;

 private:
  int n_ = 0;
  FftPlan fwd_;
  FftPlan inv_;
};

/// Unnormalized real transforms along each of `rows` contiguous rows of length n.
class RowFftReal {
 public:
  RowFftReal() = default;
  RowFftReal(int rows, int n);

  int rows() const { return rows_; }
  int n() const { return n_; }
  int half() const { return n_ / 2 + 1; }
  void forward(const double* in, cplx* out) const;
  /// Clobbers `in`.
  void inverse(cplx* in, double* out) const;

 private:
  int rows_ = 0;
  int n_ = 0;
  FftPlan fwd_;
  FftPlan inv_;
};

/// Unnormalized complex transforms along contiguous rows; sign is FFTW_FORWARD
/// (e^{-i}) or FFTW_BACKWARD (e^{+i}).
class RowFftComplex {
 public:
  RowFftComplex() = default;
  RowFftComplex(int rows, int n, int sign);

  void execute(cplx* in, cplx* out) const;

 private:
  FftPlan plan_;
};

/// FFTW real-to-real transform of one kind (REDFT00, RODFT00, ...) applied
/// separately to the real and imaginary parts of complex rows. Row r starts
/// at r·dist (complex units, dist >= n; default n).
class RowR2RComplex {
 public:
  RowR2RComplex() = default;
  RowR2RComplex(int rows, int n, fftw_r2r_kind kind, int dist = 0);

  int n() const { return n_; }
  void execute(const cplx* in, cplx* out) const;

 private:
  int n_ = 0;
  FftPlan plan_;
};

}  // namespace tat
