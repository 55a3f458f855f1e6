#pragma once

#include <span>
#include <vector>

#include "tat/array2d.hpp"

namespace tat {

/// J_0(λ) .. J_kmax(λ). Ascending series below λ = 1, normalized downward
/// recurrence otherwise.
std::vector<double> bessel_j_row(double lambda, int kmax);

/// Fills out[0..kmax] without allocating the result.
void bessel_j_row(double lambda, int kmax, std::span<double> out);

/// Order where the downward recurrence starts for a given λ and kmax.
int miller_start_order(double lambda, int kmax);

/// J_k(λ_j) for k = 0..kmax over a list of radial nodes; j(k, node).
struct BesselTable {
  int kmax = 0;
  std::vector<double> lambda;
  Array2D<double> j;
  /// Empty unless requested; jprime(k, node) for k = 0..kmax-1.
  Array2D<double> jprime;
};

/// With with_prime, the table carries one extra order so derivatives exist up
/// to `kmax`; `table.kmax` is then kmax + 1.
BesselTable make_bessel_table(std::span<const double> lambda, int kmax, bool with_prime = false);

/// J'_0 = -J_1 and J'_m = (J_{m-1} - J_{m+1}) / 2; needs at least two orders.
Array2D<double> bessel_jprime_from_table(const Array2D<double>& j);

}  // namespace tat
