#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <json.hpp>

#include "tat/fft.hpp"
#include "tat/geometry.hpp"
#include "tat/spectral.hpp"
#include "tat/special.hpp"

namespace tat {

/// Knobs that trade accuracy for cost. Defaults follow the reference setup.
struct PlanOptions {
  /// n_phi = angular_oversampling · n_theta polar angles.
  int angular_oversampling = 2;
  /// Graded quadrature for |k| <= 1 uses graded_node_factor · N_λ intervals.
  int graded_node_factor = 3;
};

void to_json(nlohmann::json& j, const PlanOptions& o);
void from_json(const nlohmann::json& j, PlanOptions& o);

/// Precomputation for g = A f. Immutable once built.
struct ForwardPlan {
  GeometryConfig cfg;
  NormalizedGeometry geo;
  ForwardExtent ext;
  PlanOptions options;
  int n_phi = 0;
  int P = 0;  // harmonics -P..P; ±P carry weight ½
  double lambda_cut = 0.0;
  std::vector<double> lambda;
  BesselTable bessel;
  GradedRule graded;
  BesselTable graded_bessel;
  GradedCosine graded_cos;
  std::vector<std::uint8_t> arc;
  Array2D<std::uint8_t> support;

  Fft2D fft;
  RowFftComplex phi_fft;
  DualTransform dual;
  RowFftReal theta_fft;
};

/// Shared precomputation for A* and the approximate inverse.
struct BackprojectionPlan {
  GeometryConfig cfg;
  NormalizedGeometry geo;
  AdjointExtent ext;
  PlanOptions options;
  int n_phi = 0;
  int P = 0;
  std::vector<double> lambda;
  BesselTable bessel;  // jprime filled for the inverse
  std::vector<std::uint8_t> arc;
  Array2D<std::uint8_t> support;

  Fft2D fft;
  RowFftComplex phi_ifft;
  DualTransform dual;
  RowFftReal theta_fft;
};

struct AdjointPlan {
  BackprojectionPlan core;
};

struct InversePlan {
  BackprojectionPlan core;
  /// Flat indices into the extended grid of nodes with support <= |x| <= 1.
  std::vector<std::size_t> annulus;
};

ForwardPlan make_forward_plan(const GeometryConfig& cfg, const PlanOptions& opt = {});
AdjointPlan make_adjoint_plan(const GeometryConfig& cfg, const PlanOptions& opt = {});
InversePlan make_inverse_plan(const GeometryConfig& cfg, const PlanOptions& opt = {});

Sinogram forward(const ImageGrid& f, const ForwardPlan& plan);
ImageGrid adjoint(const Sinogram& g, const AdjointPlan& plan);
ImageGrid inverse(const Sinogram& g, const InversePlan& plan);

/// Entries outside the arc set to zero.
void restrict_to_arc(Sinogram& g);

/// Attenuation e^{-γt} followed by a temporal filter with symbol η. η holds
/// n_time + 1 samples on the frequency grid of the trace zero-padded to
/// 2·n_time; an empty η means the all-pass filter.
struct DegradationSpec {
  double gamma = 0.0;
  std::vector<cplx> eta;

  void validate(int n_time) const;
};

void to_json(nlohmann::json& j, const DegradationSpec& d);
/// Accepts {"gamma": g, "eta": [..reals..] | [[re, im], ..]} or a named window
/// {"gamma": g, "window": {"type": "gaussian", "sigma": s}, "n_time": n} with
/// s a fraction of the Nyquist frequency.
void from_json(const nlohmann::json& j, DegradationSpec& d);

Sinogram degrade(const Sinogram& g, const DegradationSpec& spec);
Sinogram degrade_adjoint(const Sinogram& g, const DegradationSpec& spec);

/// Largest singular value of A between the weighted image and sinogram inner
/// products, by power iteration on A*A from a seeded random start.
double operator_norm(const ForwardPlan& fwd, const AdjointPlan& adj, int iters,
                     std::uint64_t seed);

}  // namespace tat
