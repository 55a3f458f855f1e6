#include <doctest.h>

#include <cmath>
#include <random>

#include "common.hpp"
#include "tat/spectral.hpp"

using namespace tat;

namespace {

Array2D<double> gaussian_on_box(const ExtendedBox& box, double sigma) {
  Array2D<double> a(box.N, box.N);
  for (int p = 0; p < box.N; ++p)
    for (int q = 0; q < box.N; ++q) {
      const double x = box.coord(q), y = box.coord(p);
      a(p, q) = std::exp(-(x * x + y * y) / (2 * sigma * sigma));
    }
  return a;
}

double wrap_index(int q, int N) { return q < N / 2 ? q : q - N; }

}  // namespace

TEST_CASE("continuous fft conventions") {
  const auto box = make_box(1.0, 1.0 / 32, 65);
  Fft2D fft(box.N);

  Array2D<double> zero(box.N, box.N, 0.0);
  auto z = fft2_continuous(zero, box, fft);
  for (auto v : z.values.flat()) CHECK(std::abs(v) == 0.0);

  Array2D<double> delta(box.N, box.N, 0.0);
  delta(0, 0) = 1.0;
  auto d = fft2_continuous(delta, box, fft);
  const double flat = box.h * box.h / kTwoPi;
  for (auto v : d.values.flat()) CHECK(std::abs(v - flat) < 1e-15);

  const double sigma = 0.1;
  auto g = fft2_continuous(gaussian_on_box(box, sigma), box, fft);
  const double cut = kPi / (4 * box.h);
  double worst = 0.0;
  for (int q2 = 0; q2 < box.N; ++q2)
    for (int q1 = 0; q1 < fft.half(); ++q1) {
      const double xi1 = q1 * box.dxi(), xi2 = wrap_index(q2, box.N) * box.dxi();
      const double r2 = xi1 * xi1 + xi2 * xi2;
      if (r2 > cut * cut) continue;
      const double exact = sigma * sigma * std::exp(-sigma * sigma * r2 / 2);
      worst = std::max(worst, std::abs(g.values(q2, q1) - exact) / (sigma * sigma));
    }
  CHECK(worst < 1e-6);
}

TEST_CASE("inverse, parseval and non-finite input") {
  const auto box = make_box(1.2, 1.0 / 32, 65);
  Fft2D fft(box.N);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  Array2D<double> a(box.N, box.N);
  for (auto& v : a.flat()) v = nd(rng);

  auto spec = fft2_continuous(a, box, fft);
  double lhs = 0.0, rhs = 0.0;
  for (double v : a.flat()) lhs += v * v;
  lhs *= box.h * box.h;
  for (int q2 = 0; q2 < box.N; ++q2)
    for (int q1 = 0; q1 < fft.half(); ++q1) {
      const double w = (q1 == 0 || q1 == box.N / 2) ? 1.0 : 2.0;
      rhs += w * std::norm(spec.values(q2, q1));
    }
  rhs *= box.dxi() * box.dxi();
  CHECK(std::abs(lhs - rhs) / lhs < 1e-10);

  auto back = ifft2_continuous(spec, fft);
  CHECK(test::rel_l2(back.flat(), a.flat()) < 1e-12);

  a(3, 4) = std::nan("");
  CHECK_THROWS(fft2_continuous(a, box, fft));
}

TEST_CASE("bilinear resampling is exact on linear spectra") {
  // F(u, v) = a + i(bu + cv) is the spectrum of a real field
  const auto box = make_box(1.0, 1.0 / 16, 33);
  CartesianSpectrum s{Array2D<cplx>(box.N, box.N / 2 + 1), box};
  const double a = 0.7, b = -0.3, c = 0.45;
  auto F = [&](double u, double v) { return cplx(a, b * u + c * v); };
  for (int q2 = 0; q2 < box.N; ++q2)
    for (int q1 = 0; q1 <= box.N / 2; ++q1) s.values(q2, q1) = F(q1, wrap_index(q2, box.N));

  for (double u : {0.0, 1.5, -2.25, 7.9})
    for (double v : {0.0, -3.3, 5.5}) CHECK(std::abs(cartesian_lookup(s, u, v) - F(u, v)) < 1e-12);
  CHECK_THROWS_AS(cartesian_lookup(s, 0.0, box.N), std::out_of_range);

  std::vector<double> lam;
  for (int j = 0; j <= 10; ++j) lam.push_back(j * box.dxi());
  auto polar = resample_cart_to_polar(s, lam, 24, 1e9);
  double worst = 0.0;
  for (int j = 0; j <= 10; ++j)
    for (int l = 0; l < 24; ++l) {
      const double u = lam[j] * std::cos(polar.phi(l)) / box.dxi();
      const double v = lam[j] * std::sin(polar.phi(l)) / box.dxi();
      worst = std::max(worst, std::abs(polar.values(j, l) - F(u, v)));
    }
  CHECK(worst < 1e-12);
  for (int l = 1; l < 24; ++l) CHECK(polar.values(0, l) == polar.values(0, 0));
}

TEST_CASE("polar to cartesian") {
  const auto box = make_box(1.0, 1.0 / 16, 33);
  PolarSpectrum p;
  p.n_phi = 32;
  for (int j = 0; j <= 20; ++j) p.lambda.push_back(j * box.dxi());
  p.values = Array2D<cplx>(21, 32, cplx(2.5, 0.0));
  auto cart = resample_polar_to_cart(p, box);
  const double lmax = p.lambda.back();
  for (int q2 = 0; q2 < box.N; ++q2)
    for (int q1 = 0; q1 <= box.N / 2; ++q1) {
      const double r = std::hypot(q1, wrap_index(q2, box.N)) * box.dxi();
      if (r <= lmax * (1 - 1e-12)) CHECK(std::abs(cart.values(q2, q1) - 2.5) < 1e-14);
      if (r > lmax * (1 + 1e-12)) CHECK(cart.values(q2, q1) == cplx(0.0));
    }

  PolarSpectrum bad = p;
  bad.lambda[3] += 0.1;
  CHECK_THROWS(resample_polar_to_cart(bad, box));
}

TEST_CASE("radial spectra resample to angle-independent polar rows") {
  const auto box = make_box(2.0, 1.0 / 32, 65);
  Fft2D fft(box.N);
  auto s = fft2_continuous(gaussian_on_box(box, 0.15), box, fft);
  std::vector<double> lam;
  for (int j = 0; j <= 40; ++j) lam.push_back(j * 0.5);
  auto p = resample_cart_to_polar(s, lam, 64, 1e9);
  double worst = 0.0;
  for (int j = 0; j <= 40; ++j) {
    const double exact = 0.0225 * std::exp(-0.0225 * lam[j] * lam[j] / 2);
    for (int l = 0; l < 64; ++l) worst = std::max(worst, std::abs(p.values(j, l) - exact));
  }
  // bilinear error scales with the squared frequency step
  CHECK(worst < 0.0225 * 0.05 * box.dxi() * box.dxi());
}

TEST_CASE("angular fft") {
  const int n = 16, rows = 3;
  RowFftReal tf(rows, n);
  Array2D<double> g(rows, n);
  for (int r = 0; r < rows; ++r)
    for (int l = 0; l < n; ++l) g(r, l) = r == 0 ? 2.0 : std::cos(3 * kTwoPi * l / n);
  auto c = angular_fft(g, tf);
  CHECK(std::abs(c(0, 0) - 2.0) < 1e-14);
  for (int k = 1; k <= n / 2; ++k) CHECK(std::abs(c(0, k)) < 1e-14);
  for (int k = 0; k <= n / 2; ++k) CHECK(std::abs(c(1, k) - (k == 3 ? 0.5 : 0.0)) < 1e-13);

  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  Array2D<double> x(5, 40);
  for (auto& v : x.flat()) v = nd(rng);
  RowFftReal t2(5, 40);
  auto cx = angular_fft(x, t2);
  for (int r = 0; r < 5; ++r) {
    CHECK(cx(r, 0).imag() == 0.0);
    CHECK(cx(r, 20).imag() == 0.0);
  }
  auto back = angular_ifft(cx, t2);
  CHECK(test::rel_l2(back.flat(), x.flat()) < 1e-13);
}

TEST_CASE("dual transforms against direct summation") {
  const int M = 24, rows = 3;
  DualTransform dt(rows, M);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  Array2D<cplx> in(rows, M + 1);
  for (auto& v : in.flat()) v = cplx(nd(rng), nd(rng));
  Array2D<cplx> cos_out(rows, M + 1), plain_out(rows, M + 1), sin_out(rows, M + 1);
  const double step = 0.37;
  dt.cosine(in, cos_out, step);
  dt.cosine_plain(in, plain_out, step);
  dt.sine(in, sin_out, step);
  double e_cos = 0, e_plain = 0, e_sin = 0, scale = 0;
  for (int r = 0; r < rows; ++r)
    for (int m = 0; m <= M; ++m) {
      cplx c = 0, p = 0, s = 0;
      for (int j = 0; j <= M; ++j) {
        const double w = (j == 0 || j == M) ? 0.5 : 1.0;
        const double arg = kPi * j * m / M;
        c += w * in(r, j) * std::cos(arg);
        p += in(r, j) * std::cos(arg);
        s += in(r, j) * std::sin(arg);
      }
      e_cos = std::max(e_cos, std::abs(step * c - cos_out(r, m)));
      e_plain = std::max(e_plain, std::abs(step * p - plain_out(r, m)));
      e_sin = std::max(e_sin, std::abs(step * s - sin_out(r, m)));
      scale = std::max(scale, std::abs(step * c));
    }
  CHECK(e_cos < 1e-11 * scale);
  CHECK(e_plain < 1e-11 * scale);
  CHECK(e_sin < 1e-11 * scale);

  // single interior node
  Array2D<cplx> e(1, M + 1, 0.0), out(1, M + 1);
  e(0, 5) = 1.0;
  DualTransform one(1, M);
  one.cosine(e, out, 1.0);
  for (int m = 0; m <= M; ++m) CHECK(std::abs(out(0, m) - std::cos(kPi * 5 * m / M)) < 1e-13);

  Array2D<cplx> zero(1, M + 1, 0.0);
  one.cosine(zero, out, 1.0);
  for (auto v : out.flat()) CHECK(v == cplx(0.0));

  Array2D<cplx> wrong(1, M);
  CHECK_THROWS(one.cosine(wrong, out, 1.0));
}

TEST_CASE("weighted cosine transform is self-adjoint") {
  const int M = 40;
  DualTransform dt(1, M);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  Array2D<cplx> a(1, M + 1), b(1, M + 1), Ca(1, M + 1), Cb(1, M + 1);
  for (auto& v : a.flat()) v = nd(rng);
  for (auto& v : b.flat()) v = nd(rng);
  dt.cosine(a, Ca, 1.0);
  dt.cosine(b, Cb, 1.0);
  double l = 0, r = 0, s = 0;
  for (int m = 0; m <= M; ++m) {
    const double w = (m == 0 || m == M) ? 0.5 : 1.0;
    l += w * (b(0, m) * Ca(0, m)).real();
    r += w * (a(0, m) * Cb(0, m)).real();
    s += std::abs(w * (b(0, m) * Ca(0, m)).real());
  }
  CHECK(std::abs(l - r) < 1e-11 * s);
}

TEST_CASE("graded quadrature") {
  const double lmax = 40.0;
  auto rule = graded_rule(lmax, 2000);
  CHECK(rule.nodes.front() == 0.0);
  CHECK(rule.nodes.back() == doctest::Approx(lmax));
  std::vector<double> times{0.0, 1.3};
  GradedCosine gc(rule, times);
  std::vector<cplx> phi(rule.nodes.size()), out(2), zero(rule.nodes.size(), 0.0);
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = rule.nodes[i] * std::exp(-rule.nodes[i]);
  gc.apply(phi, out);
  const double exact0 = 1.0 - (1.0 + lmax) * std::exp(-lmax);
  CHECK(std::abs(out[0].real() - exact0) < 1e-6 * exact0);

  // uniform Simpson rule at 4x the node count as reference for t = 1.3
  const int n = 8000;
  double ref = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double l = lmax * i / n;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    ref += w * l * std::exp(-l) * std::cos(l * 1.3);
  }
  ref *= lmax / n / 3.0;
  CHECK(std::abs(out[1].real() - ref) < 1e-6 * std::abs(ref));

  gc.apply(zero, out);
  CHECK(out[0] == cplx(0.0));
  CHECK(out[1] == cplx(0.0));
}
