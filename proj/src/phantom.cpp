#include "tat/phantom.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace tat {

double smoothstep(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return u * u * (3.0 - 2.0 * u);
}

void to_json(nlohmann::json& j, const DiskSpec& d) {
  j = nlohmann::json{{"center", {d.cx, d.cy}},
                     {"radius", d.radius},
                     {"edge_width", d.edge_width},
                     {"amplitude", d.amplitude}};
}

void from_json(const nlohmann::json& j, DiskSpec& d) {
  d.cx = j.at("center").at(0).get<double>();
  d.cy = j.at("center").at(1).get<double>();
  d.radius = j.at("radius").get<double>();
  d.edge_width = j.value("edge_width", 0.05);
  d.amplitude = j.value("amplitude", 1.0);
}

void to_json(nlohmann::json& j, const EllipseSpec& e) {
  j = nlohmann::json{{"center", {e.cx, e.cy}},  {"axes", {e.a, e.b}},
                     {"angle", e.angle},        {"edge_width", e.edge_width},
                     {"amplitude", e.amplitude}};
}

void from_json(const nlohmann::json& j, EllipseSpec& e) {
  e.cx = j.at("center").at(0).get<double>();
  e.cy = j.at("center").at(1).get<double>();
  e.a = j.at("axes").at(0).get<double>();
  e.b = j.at("axes").at(1).get<double>();
  e.angle = j.value("angle", 0.0);
  e.edge_width = j.value("edge_width", 0.05);
  e.amplitude = j.value("amplitude", 1.0);
}

void add_smoothed_disk(ImageGrid& f, const DiskSpec& d, double support_radius) {
  if (!(d.edge_width > 0) || !(d.radius > 0)) throw GeometryError("disk: radius and edge width must be positive");
  if (std::hypot(d.cx, d.cy) + d.radius > support_radius + 1e-12)
    throw GeometryError("disk: escapes the support disk");
  const int n = f.n();
  for (int iy = 0; iy < n; ++iy) {
    const double y = f.coord(iy) - d.cy;
    for (int ix = 0; ix < n; ++ix) {
      const double x = f.coord(ix) - d.cx;
      const double u = (d.radius - std::sqrt(x * x + y * y)) / d.edge_width;
      if (u > 0.0) f(iy, ix) += d.amplitude * smoothstep(u);
    }
  }
}

ImageGrid smoothed_disk(const DiskSpec& d, const GeometryConfig& cfg) {
  ImageGrid f = ImageGrid::for_config(cfg);
  add_smoothed_disk(f, d, cfg.support_radius);
  return f;
}

void add_smoothed_ellipse(ImageGrid& f, const EllipseSpec& e, double support_radius) {
  if (!(e.edge_width > 0) || !(e.a > 0) || !(e.b > 0))
    throw GeometryError("ellipse: axes and edge width must be positive");
  if (std::hypot(e.cx, e.cy) + std::max(e.a, e.b) > support_radius + 1e-12)
    throw GeometryError("ellipse: escapes the support disk");
  const double ca = std::cos(e.angle), sa = std::sin(e.angle);
  const double minor = std::min(e.a, e.b);
  const int n = f.n();
  for (int iy = 0; iy < n; ++iy) {
    const double y = f.coord(iy) - e.cy;
    for (int ix = 0; ix < n; ++ix) {
      const double x = f.coord(ix) - e.cx;
      const double xr = ca * x + sa * y, yr = -sa * x + ca * y;
      const double rho = std::sqrt((xr / e.a) * (xr / e.a) + (yr / e.b) * (yr / e.b));
      const double u = (1.0 - rho) * minor / e.edge_width;
      if (u > 0.0) f(iy, ix) += e.amplitude * smoothstep(u);
    }
  }
}

// Centers, radii and amplitudes picked by hand so the disks do not overlap
// and stay inside radius 0.98 with their smoothed rims.
const std::vector<DiskSpec>& paper_disks() {
  static const std::vector<DiskSpec> disks = {
      {-0.35, 0.40, 0.28, 0.05, 0.8}, {0.38, 0.35, 0.22, 0.05, 0.6},
      {0.05, -0.05, 0.18, 0.05, 1.0}, {-0.45, -0.40, 0.20, 0.05, 0.5},
      {0.45, -0.42, 0.25, 0.05, 0.7}, {0.0, 0.70, 0.12, 0.05, 0.9},
      {-0.75, 0.05, 0.10, 0.05, 0.6}, {0.72, 0.05, 0.08, 0.05, 0.8},
      {0.0, -0.72, 0.14, 0.05, 0.4},
  };
  return disks;
}

ImageGrid paper_phantom(const GeometryConfig& cfg) {
  ImageGrid f = ImageGrid::for_config(cfg);
  for (const auto& d : paper_disks()) add_smoothed_disk(f, d, cfg.support_radius);
  return f;
}

nlohmann::json paper_phantom_json() {
  nlohmann::json j;
  j["disks"] = paper_disks();
  return j;
}

ImageGrid upper_half_phantom(const GeometryConfig& cfg) {
  ImageGrid f = paper_phantom(cfg);
  for (int iy = 0; iy < f.n(); ++iy) {
    const double s = smoothstep(f.coord(iy) / 0.04);
    for (int ix = 0; ix < f.n(); ++ix) f(iy, ix) *= s;
  }
  return f;
}

Array2D<std::uint8_t> upper_half_mask(const GeometryConfig& cfg) {
  auto m = disk_mask(cfg.n_image, cfg.spacing(), cfg.support_radius);
  const int c = (cfg.n_image - 1) / 2;
  for (int iy = 0; iy < c; ++iy)
    for (int ix = 0; ix < cfg.n_image; ++ix) m(iy, ix) = 0;
  return m;
}

std::vector<EllipseSpec> random_ellipse_specs(std::uint64_t seed, int count_min, int count_max,
                                              double support_radius) {
  if (count_min < 0 || count_max < count_min)
    throw std::invalid_argument("random_ellipses: bad count range");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> count(count_min, count_max);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = count(rng);
  // center angles follow a golden-ratio sequence from a random offset, so
  // each phantom spreads its mass around the circle
  const double phi0 = unit(rng);
  constexpr double golden = 0.6180339887498949;
  std::vector<EllipseSpec> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    EllipseSpec e;
    e.a = 0.05 + 0.35 * unit(rng);
    e.b = 0.05 + 0.35 * unit(rng);
    e.angle = kPi * unit(rng);
    e.amplitude = 0.3 + 0.7 * unit(rng);
    e.edge_width = 0.01 + 0.07 * unit(rng);
    // uniform center in the disk that keeps the whole ellipse inside
    const double rmax = std::max(0.0, support_radius - std::max(e.a, e.b));
    const double r = rmax * std::sqrt(unit(rng));
    const double phi = kTwoPi * std::fmod(phi0 + golden * i, 1.0);
    e.cx = r * std::cos(phi);
    e.cy = r * std::sin(phi);
    out.push_back(e);
  }
  return out;
}

ImageGrid random_ellipses(std::uint64_t seed, int count_min, int count_max,
                          const GeometryConfig& cfg) {
  ImageGrid f = ImageGrid::for_config(cfg);
  for (const auto& e : random_ellipse_specs(seed, count_min, count_max, cfg.support_radius))
    add_smoothed_ellipse(f, e, cfg.support_radius);
  return f;
}

ImageGrid phantom_from_json(const nlohmann::json& j, const GeometryConfig& cfg) {
  ImageGrid f = ImageGrid::for_config(cfg);
  if (j.contains("disks"))
    for (const auto& d : j.at("disks")) add_smoothed_disk(f, d.get<DiskSpec>(), cfg.support_radius);
  if (j.contains("ellipses"))
    for (const auto& e : j.at("ellipses"))
      add_smoothed_ellipse(f, e.get<EllipseSpec>(), cfg.support_radius);
  return f;
}

}  // namespace tat
