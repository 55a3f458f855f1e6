#include "tat/special.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tat {

namespace {

constexpr double kBig = 1e250;
constexpr double kSmall = 1e-250;

void series_row(double lambda, int kmax, std::span<double> out) {
  const double half = 0.5 * lambda;
  const double q = -half * half;
  double lead = 1.0;  // (λ/2)^k / k!
  for (int k = 0; k <= kmax; ++k) {
    if (k > 0) lead *= half / k;
    if (lead == 0.0) {
      std::fill(out.begin() + k, out.begin() + kmax + 1, 0.0);
      return;
    }
    double term = lead;
    double sum = term;
    for (int m = 1; m < 60; ++m) {
      term *= q / (static_cast<double>(m) * (m + k));
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    out[k] = sum;
  }
}

void miller_row(double lambda, int kmax, std::span<double> out) {
  int start = miller_start_order(lambda, kmax);
  if (start % 2) ++start;
  const double inv = 2.0 / lambda;
  double jp1 = 0.0;
  double jk = 1e-30;
  double norm = 0.0;
  std::fill(out.begin(), out.begin() + kmax + 1, 0.0);
  // jk holds the unnormalized J_k while walking k = start .. 0
  for (int k = start; k >= 0; --k) {
    if (k <= kmax) out[k] = jk;
    if (k % 2 == 0) norm += (k == 0 ? 1.0 : 2.0) * jk;
    if (k == 0) break;
    const double jm1 = k * inv * jk - jp1;
    jp1 = jk;
    jk = jm1;
    if (std::abs(jk) > kBig) {
      jk *= kSmall;
      jp1 *= kSmall;
      norm *= kSmall;
      for (int i = k; i <= kmax; ++i) out[i] *= kSmall;
    }
  }
  const double s = 1.0 / norm;
  for (int k = 0; k <= kmax; ++k) out[k] *= s;
}

}  // namespace

int miller_start_order(double lambda, int kmax) {
  const int grow = std::max(20, static_cast<int>(std::ceil(1.5 * lambda)));
  return std::max(kmax, static_cast<int>(std::ceil(lambda))) + grow;
}

void bessel_j_row(double lambda, int kmax, std::span<double> out) {
  if (!std::isfinite(lambda)) throw std::invalid_argument("bessel_j_row: non-finite argument");
  if (lambda < 0) throw std::invalid_argument("bessel_j_row: negative argument");
  if (kmax < 0) throw std::invalid_argument("bessel_j_row: negative order");
  if (out.size() < static_cast<std::size_t>(kmax) + 1)
    throw std::invalid_argument("bessel_j_row: output too short");
  if (lambda == 0.0) {
    std::fill(out.begin(), out.begin() + kmax + 1, 0.0);
    out[0] = 1.0;
  } else if (lambda < 1.0) {
    series_row(lambda, kmax, out);
  } else {
    miller_row(lambda, kmax, out);
  }
}

std::vector<double> bessel_j_row(double lambda, int kmax) {
  std::vector<double> out(static_cast<std::size_t>(std::max(kmax, 0)) + 1);
  bessel_j_row(lambda, kmax, out);
  return out;
}

BesselTable make_bessel_table(std::span<const double> lambda, int kmax, bool with_prime) {
  if (kmax < 0) throw std::invalid_argument("make_bessel_table: negative kmax");
  BesselTable t;
  t.kmax = with_prime ? kmax + 1 : kmax;
  t.lambda.assign(lambda.begin(), lambda.end());
  const std::size_t n = lambda.size();
  t.j = Array2D<double>(t.kmax + 1, n, 0.0);
  std::vector<double> row(t.kmax + 1);
  for (std::size_t i = 0; i < n; ++i) {
    bessel_j_row(lambda[i], t.kmax, row);
    for (int k = 0; k <= t.kmax; ++k) t.j(k, i) = row[k];
  }
  if (with_prime) t.jprime = bessel_jprime_from_table(t.j);
  return t;
}

Array2D<double> bessel_jprime_from_table(const Array2D<double>& j) {
  if (j.rows() < 2) throw std::invalid_argument("bessel_jprime_from_table: needs an extra order");
  const std::size_t K = j.rows() - 1;
  const std::size_t n = j.cols();
  Array2D<double> d(K, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) d(0, i) = -j(1, i);
  for (std::size_t m = 1; m < K; ++m)
    for (std::size_t i = 0; i < n; ++i) d(m, i) = 0.5 * (j(m - 1, i) - j(m + 1, i));
  return d;
}

}  // namespace tat
