#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "tat/geometry.hpp"

namespace tat {

/// C¹ clamped smoothstep: 0 for u <= 0, 1 for u >= 1, 3u² - 2u³ between.
double smoothstep(double u);

struct DiskSpec {
  double cx = 0.0, cy = 0.0;
  double radius = 0.0;
  double edge_width = 0.05;
  double amplitude = 1.0;
};

struct EllipseSpec {
  double cx = 0.0, cy = 0.0;
  double a = 0.0, b = 0.0;  // semi-axes
  double angle = 0.0;       // rotation of the a-axis, radians
  double edge_width = 0.05;
  double amplitude = 1.0;
};

void to_json(nlohmann::json& j, const DiskSpec& d);
void from_json(const nlohmann::json& j, DiskSpec& d);
void to_json(nlohmann::json& j, const EllipseSpec& e);
void from_json(const nlohmann::json& j, EllipseSpec& e);

/// Adds amplitude·s((r - |x - c|)/w) to every node; throws if the disk leaves
/// the support disk.
void add_smoothed_disk(ImageGrid& f, const DiskSpec& d, double support_radius);
ImageGrid smoothed_disk(const DiskSpec& d, const GeometryConfig& cfg);

/// Smoothed ellipse: amplitude·s((1 - ρ)·m / w) with ρ the elliptic radius
/// and m the minor semi-axis, so w is the edge width along the minor axis.
void add_smoothed_ellipse(ImageGrid& f, const EllipseSpec& e, double support_radius);

/// The frozen composition of smoothed disks used by the experiments.
const std::vector<DiskSpec>& paper_disks();
ImageGrid paper_phantom(const GeometryConfig& cfg);

/// paper_phantom damped to the upper half plane: f(x)·s(y / 0.04).
ImageGrid upper_half_phantom(const GeometryConfig& cfg);
/// Nodes of the support disk with y >= 0.
Array2D<std::uint8_t> upper_half_mask(const GeometryConfig& cfg);

/// Seeded random smoothed ellipses, count drawn from [count_min, count_max].
std::vector<EllipseSpec> random_ellipse_specs(std::uint64_t seed, int count_min, int count_max,
                                              double support_radius);
ImageGrid random_ellipses(std::uint64_t seed, int count_min, int count_max,
                          const GeometryConfig& cfg);

/// {"disks": [...], "ellipses": [...]} rendered on the configured grid.
ImageGrid phantom_from_json(const nlohmann::json& j, const GeometryConfig& cfg);
nlohmann::json paper_phantom_json();

}  // namespace tat
