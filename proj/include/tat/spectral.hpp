#pragma once

#include <span>
#include <vector>

#include "tat/array2d.hpp"
#include "tat/fft.hpp"
#include "tat/geometry.hpp"

namespace tat {

/// Half spectrum of a real field on an ExtendedBox: values(q2, q1) ≈ f̂(ξ)
/// at ξ = (q1·Δξ, wrap(q2)·Δξ), q1 = 0..N/2. f̂(-ξ) = conj(f̂(ξ)) supplies
/// the other half.
struct CartesianSpectrum {
  Array2D<cplx> values;
  ExtendedBox box;
};

/// Samples of a 2-D transform on a polar grid; values(j, l) at
/// ξ = λ_j (cos φ_l, sin φ_l), φ_l = 2πl/n_phi.
struct PolarSpectrum {
  Array2D<cplx> values;
  std::vector<double> lambda;
  int n_phi = 0;

  double phi(int l) const { return kTwoPi * l / n_phi; }
};

/// f̂(ξ) ≈ (h²/2π) Σ f(x) e^{-iξ·x} for a field stored in the wrapped layout.
CartesianSpectrum fft2_continuous(const Array2D<double>& ext, const ExtendedBox& box,
                                  const Fft2D& fft);
/// Inverse with weight Δξ²/2π; clobbers the spectrum.
Array2D<double> ifft2_continuous(CartesianSpectrum& spec, const Fft2D& fft);

/// Bilinear lookup of the full spectrum at an arbitrary frequency in units of Δξ.
cplx cartesian_lookup(const CartesianSpectrum& spec, double u, double v);

/// Polar samples by bilinear interpolation in the Cartesian grid. Nodes with
/// λ > lambda_cut are set to zero; nodes outside the grid are rejected.
PolarSpectrum resample_cart_to_polar(const CartesianSpectrum& spec,
                                     std::span<const double> lambda, int n_phi,
                                     double lambda_cut);

/// Cartesian half spectrum on `box` by bilinear interpolation in (λ, φ), φ
/// periodic. The polar λ grid must be uniform from 0; nodes with |ξ| beyond
/// the last radius are zero.
CartesianSpectrum resample_polar_to_cart(const PolarSpectrum& polar, const ExtendedBox& box);

/// c_k = (1/n) Σ_l g(θ_l) e^{-ikθ_l}, k = 0..n/2, for every row of `samples`.
Array2D<cplx> angular_fft(const Array2D<double>& samples, const RowFftReal& fft);
/// Series summation g(θ_l) = Σ_k c_k e^{ikθ_l} with c_{-k} = conj(c_k) and the
/// k = n/2 coefficient taken as real. Exact inverse of angular_fft.
Array2D<double> angular_ifft(const Array2D<cplx>& coeffs, const RowFftReal& fft);

/// Trapezoid sums on the dual grids t_m = m·dt, λ_j = j·dλ, dλ·dt = π/M,
/// applied to every row of a (rows × (M+1)) complex array:
///   cosine:  out_m = step · Σ_j w_j a_j cos(π j m / M), w_0 = w_M = ½
///   sine:    out_m = step · Σ_j a_j sin(π j m / M)
///   plain:   out_m = step · Σ_j a_j cos(π j m / M)  (no endpoint weights)
class DualTransform {
 public:
  DualTransform() = default;
  DualTransform(int rows, int M);

  int rows() const { return rows_; }
  int M() const { return M_; }
  void cosine(const Array2D<cplx>& in, Array2D<cplx>& out, double step) const;
  void cosine_plain(const Array2D<cplx>& in, Array2D<cplx>& out, double step) const;
  void sine(const Array2D<cplx>& in, Array2D<cplx>& out, double step) const;

 private:
  void check(const Array2D<cplx>& in, Array2D<cplx>& out) const;
  int rows_ = 0;
  int M_ = 0;
  RowR2RComplex dct_;
  RowR2RComplex dst_;
};

/// Quadrature for ∫₀^{λmax} φ(λ) dλ with nodes λ_i = λmax·s_i³, s_i = i/n,
/// i = 0..n, trapezoid in s with Jacobian 3λmax·s².
struct GradedRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GradedRule graded_rule(double lambda_max, int n);

/// Precomputed cos(λ_i t_m) so that out_m = Σ_i w_i φ_i cos(λ_i t_m).
class GradedCosine {
 public:
  GradedCosine() = default;
  GradedCosine(const GradedRule& rule, std::span<const double> times);

  std::size_t n_nodes() const { return weights_.size(); }
  std::size_t n_times() const { return table_.rows(); }
  void apply(std::span<const cplx> integrand, std::span<cplx> out) const;

 private:
  std::vector<double> weights_;
  Array2D<double> table_;
};

}  // namespace tat
