#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "tat/geometry.hpp"
#include "tat/operators.hpp"

namespace tat {

enum class ReconMethod { nnls, tv };

struct ReconConfig {
  ReconMethod method = ReconMethod::nnls;
  double alpha = 0.0;        // TV weight (tv only)
  double step_primal = 0.0;  // 0: 0.9/‖A‖² for nnls, 0.9/‖A‖ for tv
  double step_dual = 0.0;    // 0: 0.9/‖A‖ (tv only)
  double relaxation = 1.0;
  int max_iters = 200;
  double stop_rel = 0.003;
  std::string roi = "support";  // "support" or "upper_half"
  int inner_prox_iters = 20;
  int norm_iters = 20;
  std::uint64_t norm_seed = 1;
  double operator_norm = 0.0;  // 0: estimate by power iteration

  void validate() const;
};

void to_json(nlohmann::json& j, const ReconConfig& c);
void from_json(const nlohmann::json& j, ReconConfig& c);

struct IterationRecord {
  int iteration = 0;
  double objective = 0.0;
  double update_norm = 0.0;
  double seconds = 0.0;
};

struct IterationTrace {
  std::vector<IterationRecord> records;
  int iterations = 0;
  bool converged = false;
  double operator_norm = 0.0;
  double rel_l2 = -1.0;  // filled when ground truth is supplied
  double rel_linf = -1.0;

  std::string to_csv() const;
};

void to_json(nlohmann::json& j, const IterationTrace& t);

struct ReconResult {
  ImageGrid f;
  IterationTrace trace;
};

/// ROI mask named by cfg.roi on the plan's image grid.
Array2D<std::uint8_t> roi_mask(const std::string& name, const GeometryConfig& geo);

/// Projected gradient for min ‖Af - g‖² subject to f >= 0 and supp f ⊆ roi.
ReconResult nnls(const Sinogram& g, const ReconConfig& cfg, const ForwardPlan& fwd,
                 const AdjointPlan& adj, const ImageGrid* truth = nullptr);

/// Primal-dual iterations for min ½‖Af - g‖² + α·TV(f) with supp f ⊆ roi.
ReconResult tv_pdhg(const Sinogram& g, const ReconConfig& cfg, const ForwardPlan& fwd,
                    const AdjointPlan& adj, const ImageGrid* truth = nullptr);

struct VectorField {
  Array2D<double> x;  // along columns
  Array2D<double> y;  // along rows
};

/// Unit-spacing forward differences with zero flux at the far edge.
VectorField grad(const Array2D<double>& f);
/// Negative adjoint of grad.
Array2D<double> div(const VectorField& q);

/// Σ |∇f| with the isotropic pointwise norm.
double total_variation(const Array2D<double>& f);

/// argmin_u Σ|∇u| + ‖u - f‖²/(2τ), approximated by `iters` projected
/// gradient steps on the dual. `dual`, when given, is the warm start and
/// receives the final dual field.
Array2D<double> tv_prox(const Array2D<double>& f, double tau, int iters,
                        VectorField* dual = nullptr);
ImageGrid tv_prox(const ImageGrid& f, double tau, int iters = 20);

/// g + χ with χ white Gaussian on arc samples and ‖χ‖ = level·‖g‖ exactly.
Sinogram add_noise(const Sinogram& g, double level, std::uint64_t seed);

struct Metrics {
  double rel_l2 = 0.0;
  double rel_linf = 0.0;
};

Metrics metrics(const ImageGrid& estimate, const ImageGrid& truth);

}  // namespace tat
