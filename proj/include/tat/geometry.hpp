#pragma once

#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tat/array2d.hpp"

namespace tat {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Raised for malformed configurations, shape mismatches and violated preconditions.
class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Detector arc Γ on the circle, closed interval [theta0, theta1] in radians
/// measured counter-clockwise from the +x axis.
struct Arc {
  bool full = true;
  double theta0 = 0.0;
  double theta1 = kTwoPi;

  static Arc full_circle() { return {}; }
  static Arc from_degrees(double deg0, double deg1);
  /// Arc length in (0, 2π].
  double length() const;
};

struct GeometryConfig {
  int n_image = 257;
  double half_width = 1.0;
  double support_radius = 0.98;
  double detector_radius = 1.0;
  double sound_speed = 1.0;
  int n_theta = 360;
  int n_time = 513;
  double T = 4.0;
  Arc arc;

  void validate() const;
  double spacing() const { return 2.0 * half_width / (n_image - 1); }
  double dt() const { return T / (n_time - 1); }
  double theta(int l) const { return kTwoPi * l / n_theta; }
};

void to_json(nlohmann::json& j, const Arc& a);
void from_json(const nlohmann::json& j, Arc& a);
void to_json(nlohmann::json& j, const GeometryConfig& c);
void from_json(const nlohmann::json& j, GeometryConfig& c);

/// Samples of a real function on the origin-centered n×n grid.
/// values(iy, ix) sits at x = ((ix - c)h, (iy - c)h), c = (n-1)/2.
struct ImageGrid {
  Array2D<double> values;
  double spacing = 0.0;

  ImageGrid() = default;
  ImageGrid(int n, double h) : values(n, n, 0.0), spacing(h) {}

  static ImageGrid for_config(const GeometryConfig& cfg) {
    return ImageGrid(cfg.n_image, cfg.spacing());
  }

  int n() const { return static_cast<int>(values.rows()); }
  int center() const { return (n() - 1) / 2; }
  double coord(int i) const { return (i - center()) * spacing; }
  double& operator()(int iy, int ix) { return values(iy, ix); }
  double operator()(int iy, int ix) const { return values(iy, ix); }
};

/// Measured traces g(t_m, θ_l); rows are time samples t_m = m·dt, columns are detectors.
struct Sinogram {
  Array2D<double> values;
  double dt = 0.0;
  std::vector<std::uint8_t> arc_mask;

  Sinogram() = default;
  Sinogram(int n_time, int n_theta, double dt_, std::vector<std::uint8_t> mask)
      : values(n_time, n_theta, 0.0), dt(dt_), arc_mask(std::move(mask)) {}

  static Sinogram for_config(const GeometryConfig& cfg);

  int n_time() const { return static_cast<int>(values.rows()); }
  int n_theta() const { return static_cast<int>(values.cols()); }
  double time(int m) const { return m * dt; }
  double theta(int l) const { return kTwoPi * l / n_theta(); }
  double& operator()(int m, int l) { return values(m, l); }
  double operator()(int m, int l) const { return values(m, l); }
};

/// Square [-L, L]² discretized with the image spacing. Arrays on the box use
/// the wrapped layout: node p along an axis sits at coordinate p·h for
/// p < N/2 and (p - N)·h otherwise, so the origin is index 0.
struct ExtendedBox {
  double L = 0.0;
  int N = 0;
  double h = 0.0;

  double dxi() const { return kTwoPi / (N * h); }
  double coord(int p) const { return (p < N / 2 ? p : p - N) * h; }
};

/// Smallest even integer >= n whose only prime factors are 2, 3 and 5.
int next_fast_even(int n);

/// Box of half-width at least L with the given spacing; N·h >= 2L, N even.
ExtendedBox make_box(double L, double h, int n_image);

Array2D<double> embed(const ImageGrid& f, const ExtendedBox& box);
ImageGrid restrict_to_image(const Array2D<double>& ext, const ExtendedBox& box, int n_image);

/// Detector selection for the closed arc; true entries are measured.
std::vector<std::uint8_t> arc_mask(const GeometryConfig& cfg);

/// Trapezoid weights for t_m = m·dt on [0, (n-1)dt] (endpoints ½).
std::vector<double> trapezoid_weights(int n);

/// ⟨a, b⟩ over the image with cell area h².
double image_inner(const ImageGrid& a, const ImageGrid& b);
/// ⟨a, b⟩ over the time-space cylinder with trapezoid weights in t and
/// arc-length weights R·2π/n_θ on the detector circle.
double sinogram_inner(const Sinogram& a, const Sinogram& b, double detector_radius = 1.0);

/// Nodes of the image grid with |x| <= radius (closed disk).
Array2D<std::uint8_t> disk_mask(int n, double h, double radius);

/// Geometry rescaled to a unit detector circle and unit sound speed; all plan
/// grids are expressed in these units.
struct NormalizedGeometry {
  double h = 0.0;        // image spacing / R
  double dt = 0.0;       // c·dt / R
  double T = 0.0;        // c·T / R
  double support = 0.0;  // support_radius / R
  double length_scale = 1.0;
  double time_scale = 1.0;

  static NormalizedGeometry from(const GeometryConfig& cfg);
};

/// Paired cosine-transform grids t_m = m·dt (m = 0..M) and λ_j = j·dλ
/// (j = 0..M) with dλ·dt = π/M.
struct DualGrid {
  double dt = 0.0;
  int M = 0;
  double dlambda = 0.0;

  static DualGrid covering(double horizon, double dt);
  double horizon() const { return M * dt; }
  double lambda_max() const { return M * dlambda; }
  double lambda(int j) const { return j * dlambda; }
};

/// Domain sizes for the forward operator: model horizon T_new = max(2T, 6),
/// box half-width L = T_new + 2, reflection time 2(L - 1).
struct ForwardExtent {
  double T_new = 0.0;
  double L = 0.0;
  double T_refl = 0.0;
  ExtendedBox box;
  DualGrid grid;
};

/// Domain sizes shared by the adjoint and the inverse: L = 1.1 + T and data
/// zero-extended to T_large = max(2.1, 4T).
struct AdjointExtent {
  double L = 0.0;
  double T_large = 0.0;
  ExtendedBox box;
  DualGrid grid;
};

ForwardExtent forward_extent(const GeometryConfig& cfg);
AdjointExtent adjoint_extent(const GeometryConfig& cfg);

}  // namespace tat
