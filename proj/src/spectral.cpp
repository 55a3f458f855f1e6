#include "tat/spectral.hpp"

#include <cmath>
#include <stdexcept>

namespace tat {

namespace {

int wrap_index(long i, int n) {
  long r = i % n;
  return static_cast<int>(r < 0 ? r + n : r);
}

}  // namespace

CartesianSpectrum fft2_continuous(const Array2D<double>& ext, const ExtendedBox& box,
                                  const Fft2D& fft) {
  const int N = box.N;
  if (fft.n() != N || static_cast<int>(ext.rows()) != N || static_cast<int>(ext.cols()) != N)
    throw std::invalid_argument("fft2_continuous: shape does not match box");
  for (double v : ext.flat())
    if (!std::isfinite(v)) throw std::invalid_argument("fft2_continuous: non-finite input");
  CartesianSpectrum s{Array2D<cplx>(N, fft.half()), box};
  fft.forward(ext.data(), s.values.data());
  const double scale = box.h * box.h / kTwoPi;
  for (auto& c : s.values.flat()) c *= scale;
  return s;
}

Array2D<double> ifft2_continuous(CartesianSpectrum& spec, const Fft2D& fft) {
  const int N = spec.box.N;
  if (fft.n() != N) throw std::invalid_argument("ifft2_continuous: plan size mismatch");
  Array2D<double> out(N, N);
  fft.inverse(spec.values.data(), out.data());
  const double dxi = spec.box.dxi();
  const double scale = dxi * dxi / kTwoPi;
  for (auto& v : out.flat()) v *= scale;
  return out;
}

cplx cartesian_lookup(const CartesianSpectrum& spec, double u, double v) {
  const int N = spec.box.N;
  const int half = N / 2;
  bool flip = false;
  if (u < 0) {
    u = -u;
    v = -v;
    flip = true;
  }
  if (u > half + 1e-9 || std::abs(v) > half + 1e-9)
    throw std::out_of_range("cartesian_lookup: frequency outside the grid");
  int u0 = static_cast<int>(std::floor(u));
  if (u0 >= half) u0 = half - 1;
  const double fu = u - u0;
  const double vf = std::floor(v);
  const double fv = v - vf;
  const int r0 = wrap_index(static_cast<long>(vf), N);
  const int r1 = r0 + 1 == N ? 0 : r0 + 1;
  const auto& a = spec.values;
  cplx val = (1 - fv) * ((1 - fu) * a(r0, u0) + fu * a(r0, u0 + 1)) +
             fv * ((1 - fu) * a(r1, u0) + fu * a(r1, u0 + 1));
  return flip ? std::conj(val) : val;
}

PolarSpectrum resample_cart_to_polar(const CartesianSpectrum& spec,
                                     std::span<const double> lambda, int n_phi,
                                     double lambda_cut) {
  if (n_phi < 1) throw std::invalid_argument("resample_cart_to_polar: n_phi must be positive");
  PolarSpectrum p;
  p.n_phi = n_phi;
  p.lambda.assign(lambda.begin(), lambda.end());
  p.values = Array2D<cplx>(lambda.size(), n_phi);
  const double inv = 1.0 / spec.box.dxi();
  std::vector<double> c(n_phi), s(n_phi);
  for (int l = 0; l < n_phi; ++l) {
    c[l] = std::cos(p.phi(l));
    s[l] = std::sin(p.phi(l));
  }
  for (std::size_t j = 0; j < lambda.size(); ++j) {
    const double lam = lambda[j];
    if (lam > lambda_cut) continue;
    auto row = p.values.row(j);
    if (lam == 0.0) {
      row[0] = spec.values(0, 0);
      for (int l = 1; l < n_phi; ++l) row[l] = row[0];
      continue;
    }
    const double r = lam * inv;
    for (int l = 0; l < n_phi; ++l) row[l] = cartesian_lookup(spec, r * c[l], r * s[l]);
  }
  return p;
}

CartesianSpectrum resample_polar_to_cart(const PolarSpectrum& polar, const ExtendedBox& box) {
  const std::size_t nl = polar.lambda.size();
  if (nl < 2 || polar.lambda[0] != 0.0)
    throw std::invalid_argument("resample_polar_to_cart: λ grid must start at 0");
  const double dl = polar.lambda[1];
  const double lmax = polar.lambda.back();
  for (std::size_t j = 1; j < nl; ++j)
    if (std::abs(polar.lambda[j] - dl * j) > 1e-9 * lmax)
      throw std::invalid_argument("resample_polar_to_cart: λ grid must be uniform");
  const int N = box.N;
  const int half = N / 2 + 1;
  const int nphi = polar.n_phi;
  const double dxi = box.dxi();
  const double inv_dphi = nphi / kTwoPi;
  CartesianSpectrum out{Array2D<cplx>(N, half), box};
  const auto& a = polar.values;
  for (int q2 = 0; q2 < N; ++q2) {
    const double v = q2 < N / 2 ? q2 : q2 - N;
    auto row = out.values.row(q2);
    for (int q1 = 0; q1 < half; ++q1) {
      const double lam = dxi * std::sqrt(static_cast<double>(q1) * q1 + v * v);
      if (lam > lmax) continue;
      if (lam == 0.0) {
        row[q1] = a(0, 0);
        continue;
      }
      double phi = std::atan2(v, static_cast<double>(q1));
      if (phi < 0) phi += kTwoPi;
      const double x = lam / dl;
      std::size_t j0 = static_cast<std::size_t>(x);
      if (j0 >= nl - 1) j0 = nl - 2;
      const double fx = x - j0;
      const double y = phi * inv_dphi;
      const double yf = std::floor(y);
      const double fy = y - yf;
      const int l0 = wrap_index(static_cast<long>(yf), nphi);
      const int l1 = l0 + 1 == nphi ? 0 : l0 + 1;
      row[q1] = (1 - fx) * ((1 - fy) * a(j0, l0) + fy * a(j0, l1)) +
                fx * ((1 - fy) * a(j0 + 1, l0) + fy * a(j0 + 1, l1));
    }
  }
  return out;
}

Array2D<cplx> angular_fft(const Array2D<double>& samples, const RowFftReal& fft) {
  if (static_cast<int>(samples.rows()) != fft.rows() || static_cast<int>(samples.cols()) != fft.n())
    throw std::invalid_argument("angular_fft: shape mismatch");
  Array2D<cplx> c(samples.rows(), fft.half());
  fft.forward(samples.data(), c.data());
  const double s = 1.0 / fft.n();
  for (auto& v : c.flat()) v *= s;
  return c;
}

Array2D<double> angular_ifft(const Array2D<cplx>& coeffs, const RowFftReal& fft) {
  if (static_cast<int>(coeffs.rows()) != fft.rows() || static_cast<int>(coeffs.cols()) != fft.half())
    throw std::invalid_argument("angular_ifft: shape mismatch");
  Array2D<cplx> work = coeffs;
  const int nyq = fft.n() / 2;
  for (std::size_t r = 0; r < work.rows(); ++r) {
    work(r, 0) = work(r, 0).real();
    if (fft.n() % 2 == 0) work(r, nyq) = work(r, nyq).real();
  }
  Array2D<double> out(coeffs.rows(), fft.n());
  fft.inverse(work.data(), out.data());
  return out;
}

DualTransform::DualTransform(int rows, int M)
    : rows_(rows),
      M_(M),
      dct_(rows, M + 1, FFTW_REDFT00),
      dst_(rows, M - 1, FFTW_RODFT00, M + 1) {
  if (M < 2) throw std::invalid_argument("DualTransform: M must be >= 2");
}

void DualTransform::check(const Array2D<cplx>& in, Array2D<cplx>& out) const {
  if (static_cast<int>(in.rows()) != rows_ || static_cast<int>(in.cols()) != M_ + 1)
    throw std::invalid_argument("DualTransform: input shape mismatch");
  if (!out.same_shape(in)) out = Array2D<cplx>(in.rows(), in.cols());
}

// REDFT00 returns a_0 + (-1)^m a_M + 2Σ a_j cos(πjm/M), i.e. twice the
// trapezoid sum.
void DualTransform::cosine(const Array2D<cplx>& in, Array2D<cplx>& out, double step) const {
  check(in, out);
  dct_.execute(in.data(), out.data());
  const double s = 0.5 * step;
  for (auto& v : out.flat()) v *= s;
}

void DualTransform::cosine_plain(const Array2D<cplx>& in, Array2D<cplx>& out,
                                 double step) const {
  Array2D<cplx> w = in;
  for (int r = 0; r < rows_; ++r) {
    w(r, 0) *= 2.0;
    w(r, M_) *= 2.0;
  }
  cosine(w, out, step);
}

void DualTransform::sine(const Array2D<cplx>& in, Array2D<cplx>& out, double step) const {
  check(in, out);
  dst_.execute(in.data() + 1, out.data() + 1);
  const double s = 0.5 * step;
  for (int r = 0; r < rows_; ++r) {
    auto row = out.row(r);
    row[0] = 0.0;
    row[M_] = 0.0;
    for (int m = 1; m < M_; ++m) row[m] *= s;
  }
}

GradedRule graded_rule(double lambda_max, int n) {
  if (n < 1 || !(lambda_max > 0)) throw std::invalid_argument("graded_rule: bad parameters");
  GradedRule r;
  r.nodes.resize(n + 1);
  r.weights.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double s = static_cast<double>(i) / n;
    r.nodes[i] = lambda_max * s * s * s;
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    r.weights[i] = w / n * 3.0 * lambda_max * s * s;
  }
  return r;
}

GradedCosine::GradedCosine(const GradedRule& rule, std::span<const double> times)
    : weights_(rule.weights), table_(times.size(), rule.nodes.size()) {
  for (std::size_t m = 0; m < times.size(); ++m) {
    auto row = table_.row(m);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      row[i] = std::cos(rule.nodes[i] * times[m]);
  }
}

void GradedCosine::apply(std::span<const cplx> integrand, std::span<cplx> out) const {
  if (integrand.size() != weights_.size() || out.size() != table_.rows())
    throw std::invalid_argument("GradedCosine: size mismatch");
  std::vector<double> re(weights_.size()), im(weights_.size());
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    re[i] = weights_[i] * integrand[i].real();
    im[i] = weights_[i] * integrand[i].imag();
  }
  for (std::size_t m = 0; m < table_.rows(); ++m) {
    auto row = table_.row(m);
    double sr = 0.0, si = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) {
      sr += row[i] * re[i];
      si += row[i] * im[i];
    }
    out[m] = {sr, si};
  }
}

}  // namespace tat
