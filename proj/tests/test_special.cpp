#include <doctest.h>

#include <cmath>

#include "tat/oracle.hpp"
#include "tat/special.hpp"

using namespace tat;

namespace {

// Independent double-precision series, summed until the terms stop mattering.
double series_j(double x, int k) {
  double term = 1.0;
  for (int i = 1; i <= k; ++i) term *= 0.5 * x / i;
  double sum = term;
  for (int m = 1; m < 200; ++m) {
    term *= -(0.25 * x * x) / (m * double(m + k));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace

TEST_CASE("values at zero") {
  auto r = bessel_j_row(0.0, 4);
  CHECK(r == std::vector<double>{1, 0, 0, 0, 0});
  std::vector<double> lam{0.0};
  auto t = make_bessel_table(lam, 4, true);
  CHECK(t.jprime(0, 0) == 0.0);
  CHECK(t.jprime(1, 0) == 0.5);
}

TEST_CASE("first zero of J0 and small arguments") {
  CHECK(std::abs(bessel_j_row(2.404825557695773, 0)[0]) < 1e-10);
  CHECK(bessel_j_row(1.0, 1)[1] == doctest::Approx(series_j(1.0, 1)).epsilon(1e-13));
  for (double x : {0.01, 0.3, 0.99, 1.0, 1.5, 4.0})
    for (int k = 0; k <= 12; ++k) CHECK(std::abs(bessel_j_row(x, 12)[k] - series_j(x, k)) < 1e-13);
}

TEST_CASE("rejects bad arguments") {
  CHECK_THROWS(bessel_j_row(-1.0, 3));
  CHECK_THROWS(bessel_j_row(std::nan(""), 3));
  CHECK_THROWS(bessel_j_row(1.0, -1));
}

TEST_CASE("agrees with the multiprecision series") {
  double worst = 0.0;
  for (double x : {1.7, 9.3, 33.3, 101.0, 257.5, 400.0}) {
    auto row = bessel_j_row(x, 256);
    for (int k : {0, 1, 2, 5, 40, 99, 180, 256}) worst = std::max(worst, std::abs(row[k] - bessel_series_reference(x, k)));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("normalization and recurrence properties") {
  for (double x : {0.5, 3.0, 27.0, 150.0, 390.0}) {
    const int K = static_cast<int>(x) + 60;
    auto r = bessel_j_row(x, K);
    double s = r[0];
    for (int m = 2; m <= K; m += 2) s += 2 * r[m];
    CHECK(std::abs(s - 1.0) < 1e-10);
    for (int k = 1; k < K && k <= x; ++k) CHECK(std::abs(r[k + 1] - (2.0 * k / x * r[k] - r[k - 1])) < 1e-8);
    for (int k = 0; k + 2 <= K; ++k)
      if (std::abs(r[k]) <= 1e-14 && k > x) CHECK(std::abs(r[k + 2]) <= 1e-12);
    for (double v : r) CHECK(std::abs(v) <= 1.0);
  }
}

TEST_CASE("derivative table") {
  std::vector<double> lam{0.3, 1.0, 7.5, 60.0};
  auto t = make_bessel_table(lam, 20, true);
  CHECK(t.kmax == 21);
  for (std::size_t i = 0; i < lam.size(); ++i) CHECK(t.jprime(0, i) + t.j(1, i) == 0.0);
  const double eps = 1e-5;
  const double fd = (series_j(1.0 + eps, 2) - series_j(1.0 - eps, 2)) / (2 * eps);
  CHECK(std::abs(t.jprime(2, 1) - fd) < 1e-8);

  Array2D<double> one_order(1, 3, 0.0);
  CHECK_THROWS(bessel_jprime_from_table(one_order));
}

TEST_CASE("miller start order") {
  CHECK(miller_start_order(10.0, 5) >= 5 + 20);
  CHECK(miller_start_order(300.0, 5) >= 300 + 450);
}
