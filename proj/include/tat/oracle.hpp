#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "tat/geometry.hpp"
#include "tat/operators.hpp"

namespace tat {

/// Reference forward operator: per time step p(t) = F⁻¹[f̂ cos(c|ξ|t)] on a
/// periodic box, then bicubic (Catmull-Rom) interpolation at the detectors.
/// `f` may be sampled at any odd resolution over the configured image square.
Sinogram slow_forward(const ImageGrid& f, const GeometryConfig& cfg);

/// One explicit leapfrog step of p_tt = c²Δp with the five-point Laplacian;
/// nodes with interior == 0 are copied from `next` unchanged (Dirichlet).
/// r2 = (c·dt/h)².
void leapfrog_step(const Array2D<double>& prev, const Array2D<double>& cur,
                   Array2D<double>& next, double r2, const Array2D<std::uint8_t>& interior);

/// Discrete energy between two successive leapfrog levels; conserved exactly
/// under free evolution with zero Dirichlet values.
double leapfrog_energy(const Array2D<double>& prev, const Array2D<double>& cur, double h,
                       double dt, double c);

/// Finite-difference time reversal: march the wave equation backward from
/// t = T with zero state, imposing g on grid nodes with |x| >= R, and return
/// the field at t = 0 on the support disk. The step is dt / substeps.
ImageGrid fd_time_reversal(const Sinogram& g, const GeometryConfig& cfg, int substeps = 2);

/// |⟨Af, g⟩ - ⟨f, A*g⟩| / (‖Af‖·‖g‖) with the weighted inner products.
double dot_discrepancy(const ImageGrid& f, const Sinogram& g, const ForwardPlan& fwd,
                       const AdjointPlan& adj);

/// White noise on the support disk and on the arc for every time sample.
ImageGrid random_image(const GeometryConfig& cfg, std::uint64_t seed);
Sinogram random_sinogram(const GeometryConfig& cfg, std::uint64_t seed);

/// n -> 2n - 1, n_theta -> 2 n_theta, n_time -> 2 n_time - 1.
GeometryConfig refined(const GeometryConfig& cfg);

struct DotTestReport {
  int trials = 0;
  double max_coarse = 0.0;
  double mean_coarse = 0.0;
  double max_fine = 0.0;
  double mean_fine = 0.0;
  double ratio = 0.0;  // max_fine / max_coarse
};

void to_json(nlohmann::json& j, const DotTestReport& r);

DotTestReport dense_dot_test(const GeometryConfig& cfg, int trials, std::uint64_t seed,
                             const PlanOptions& opt = {});

/// J_k(λ) from the ascending series in 250-digit arithmetic.
double bessel_series_reference(double lambda, int k);

}  // namespace tat
