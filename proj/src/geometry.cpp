#include "tat/geometry.hpp"

#include <cmath>

namespace tat {

namespace {

double wrap_angle(double a) {
  double w = std::fmod(a, kTwoPi);
  if (w < 0) w += kTwoPi;
  return w;
}

}  // namespace

Arc Arc::from_degrees(double deg0, double deg1) {
  Arc a;
  a.full = false;
  a.theta0 = deg0 * kPi / 180.0;
  a.theta1 = deg1 * kPi / 180.0;
  return a;
}

double Arc::length() const {
  if (full) return kTwoPi;
  double len = theta1 - theta0;
  if (len > kTwoPi) return kTwoPi;
  if (len <= 0) len = wrap_angle(len);
  return len;
}

void GeometryConfig::validate() const {
  if (n_image < 3 || n_image % 2 == 0)
    throw GeometryError("n_image must be odd and >= 3");
  if (!(half_width > 0)) throw GeometryError("half_width must be positive");
  if (!(support_radius > 0) || !(support_radius < detector_radius))
    throw GeometryError("support_radius must lie in (0, detector_radius)");
  if (!(sound_speed > 0)) throw GeometryError("sound_speed must be positive");
  if (n_theta < 2 || n_theta % 2 != 0) throw GeometryError("n_theta must be even and >= 2");
  if (n_time < 2) throw GeometryError("n_time must be >= 2");
  if (!(T > 0) || !std::isfinite(T)) throw GeometryError("T must be positive");
  if (!arc.full) {
    if (!std::isfinite(arc.theta0) || !std::isfinite(arc.theta1))
      throw GeometryError("arc endpoints must be finite");
    double len = arc.theta1 - arc.theta0;
    if (!(len > 0) || len > kTwoPi + 1e-12)
      throw GeometryError("arc length must lie in (0, 2π]");
  }
}

void to_json(nlohmann::json& j, const Arc& a) {
  if (a.full) {
    j = nlohmann::json{{"full", true}};
  } else {
    j = nlohmann::json{{"full", false}, {"theta0", a.theta0}, {"theta1", a.theta1}};
  }
}

void from_json(const nlohmann::json& j, Arc& a) {
  if (j.is_string()) {
    if (j.get<std::string>() != "full") throw GeometryError("arc string must be \"full\"");
    a = Arc::full_circle();
    return;
  }
  a.full = j.value("full", false);
  if (a.full) {
    a.theta0 = 0.0;
    a.theta1 = kTwoPi;
    return;
  }
  if (j.contains("theta0_deg")) {
    a = Arc::from_degrees(j.at("theta0_deg").get<double>(), j.at("theta1_deg").get<double>());
    return;
  }
  a.theta0 = j.at("theta0").get<double>();
  a.theta1 = j.at("theta1").get<double>();
}

void to_json(nlohmann::json& j, const GeometryConfig& c) {
  j = nlohmann::json{{"n_image", c.n_image},
                     {"half_width", c.half_width},
                     {"support_radius", c.support_radius},
                     {"detector_radius", c.detector_radius},
                     {"sound_speed", c.sound_speed},
                     {"n_theta", c.n_theta},
                     {"n_time", c.n_time},
                     {"T", c.T},
                     {"arc", c.arc}};
}

void from_json(const nlohmann::json& j, GeometryConfig& c) {
  GeometryConfig d;
  c.n_image = j.value("n_image", d.n_image);
  c.half_width = j.value("half_width", d.half_width);
  c.support_radius = j.value("support_radius", d.support_radius);
  c.detector_radius = j.value("detector_radius", d.detector_radius);
  c.sound_speed = j.value("sound_speed", d.sound_speed);
  c.n_theta = j.value("n_theta", d.n_theta);
  c.n_time = j.value("n_time", d.n_time);
  c.T = j.value("T", d.T);
  c.arc = j.contains("arc") ? j.at("arc").get<Arc>() : Arc::full_circle();
}

Sinogram Sinogram::for_config(const GeometryConfig& cfg) {
  return Sinogram(cfg.n_time, cfg.n_theta, cfg.dt(), tat::arc_mask(cfg));
}

int next_fast_even(int n) {
  if (n < 2) n = 2;
  for (int m = n + (n % 2);; m += 2) {
    int r = m;
    for (int p : {2, 3, 5})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

ExtendedBox make_box(double L, double h, int n_image) {
  if (!(h > 0) || !(L > 0)) throw GeometryError("box needs positive L and h");
  int need = static_cast<int>(std::ceil(2.0 * L / h - 1e-9));
  need = std::max(need, n_image + 1);
  ExtendedBox box;
  box.N = next_fast_even(need);
  box.h = h;
  box.L = 0.5 * box.N * h;
  return box;
}

Array2D<double> embed(const ImageGrid& f, const ExtendedBox& box) {
  const int n = f.n();
  if (std::abs(f.spacing - box.h) > 1e-12 * box.h)
    throw GeometryError("embed: image spacing differs from box spacing");
  if (n >= box.N) throw GeometryError("embed: image does not fit inside the box");
  const int c = f.center();
  const int N = box.N;
  Array2D<double> ext(N, N, 0.0);
  for (int iy = 0; iy < n; ++iy) {
    const int py = ((iy - c) % N + N) % N;
    for (int ix = 0; ix < n; ++ix) {
      const int px = ((ix - c) % N + N) % N;
      ext(py, px) = f(iy, ix);
    }
  }
  return ext;
}

ImageGrid restrict_to_image(const Array2D<double>& ext, const ExtendedBox& box, int n_image) {
  const int N = box.N;
  if (static_cast<int>(ext.rows()) != N || static_cast<int>(ext.cols()) != N)
    throw GeometryError("restrict: array shape does not match box");
  if (n_image >= N) throw GeometryError("restrict: target larger than box");
  ImageGrid f(n_image, box.h);
  const int c = f.center();
  for (int iy = 0; iy < n_image; ++iy) {
    const int py = ((iy - c) % N + N) % N;
    for (int ix = 0; ix < n_image; ++ix) {
      const int px = ((ix - c) % N + N) % N;
      f(iy, ix) = ext(py, px);
    }
  }
  return f;
}

std::vector<std::uint8_t> arc_mask(const GeometryConfig& cfg) {
  std::vector<std::uint8_t> mask(cfg.n_theta, 1);
  if (cfg.arc.full || cfg.arc.length() >= kTwoPi - 1e-12) return mask;
  const double start = wrap_angle(cfg.arc.theta0);
  const double len = cfg.arc.length();
  for (int l = 0; l < cfg.n_theta; ++l) {
    double rel = wrap_angle(cfg.theta(l) - start);
    // closed arc: endpoints included up to round-off
    if (rel > kTwoPi - 1e-9) rel = 0.0;
    mask[l] = rel <= len + 1e-9 ? 1 : 0;
  }
  return mask;
}

std::vector<double> trapezoid_weights(int n) {
  std::vector<double> w(n, 1.0);
  if (n >= 1) w.front() = 0.5;
  if (n >= 2) w.back() = 0.5;
  return w;
}

double image_inner(const ImageGrid& a, const ImageGrid& b) {
  if (!a.values.same_shape(b.values)) throw GeometryError("image_inner: shape mismatch");
  double s = 0.0;
  auto fa = a.values.flat();
  auto fb = b.values.flat();
  for (std::size_t i = 0; i < fa.size(); ++i) s += fa[i] * fb[i];
  return s * a.spacing * a.spacing;
}

double sinogram_inner(const Sinogram& a, const Sinogram& b, double detector_radius) {
  if (!a.values.same_shape(b.values)) throw GeometryError("sinogram_inner: shape mismatch");
  const int nt = a.n_time();
  const int nth = a.n_theta();
  const auto w = trapezoid_weights(nt);
  double s = 0.0;
  for (int m = 0; m < nt; ++m) {
    double row = 0.0;
    auto ra = a.values.row(m);
    auto rb = b.values.row(m);
    for (int l = 0; l < nth; ++l) row += ra[l] * rb[l];
    s += w[m] * row;
  }
  return s * a.dt * detector_radius * kTwoPi / nth;
}

Array2D<std::uint8_t> disk_mask(int n, double h, double radius) {
  Array2D<std::uint8_t> m(n, n, 0);
  const int c = (n - 1) / 2;
  const double r2 = radius * radius * (1.0 + 1e-12);
  for (int iy = 0; iy < n; ++iy) {
    const double y = (iy - c) * h;
    for (int ix = 0; ix < n; ++ix) {
      const double x = (ix - c) * h;
      m(iy, ix) = x * x + y * y <= r2 ? 1 : 0;
    }
  }
  return m;
}

NormalizedGeometry NormalizedGeometry::from(const GeometryConfig& cfg) {
  cfg.validate();
  NormalizedGeometry g;
  g.length_scale = cfg.detector_radius;
  g.time_scale = cfg.detector_radius / cfg.sound_speed;
  g.h = cfg.spacing() / g.length_scale;
  g.dt = cfg.dt() / g.time_scale;
  g.T = cfg.T / g.time_scale;
  g.support = cfg.support_radius / g.length_scale;
  return g;
}

DualGrid DualGrid::covering(double horizon, double dt) {
  if (!(dt > 0) || !(horizon > 0)) throw GeometryError("dual grid needs positive horizon and dt");
  DualGrid d;
  d.dt = dt;
  d.M = std::max(2, static_cast<int>(std::ceil(horizon / dt - 1e-9)));
  d.dlambda = kPi / (d.M * dt);
  return d;
}

ForwardExtent forward_extent(const GeometryConfig& cfg) {
  const auto g = NormalizedGeometry::from(cfg);
  ForwardExtent e;
  e.T_new = std::max(2.0 * g.T, 6.0);
  e.L = e.T_new + 2.0;
  e.box = make_box(e.L, g.h, cfg.n_image);
  e.T_refl = 2.0 * (e.box.L - 1.0);
  e.grid = DualGrid::covering(e.T_new, g.dt);
  return e;
}

AdjointExtent adjoint_extent(const GeometryConfig& cfg) {
  const auto g = NormalizedGeometry::from(cfg);
  AdjointExtent e;
  e.L = 1.1 + g.T;
  e.T_large = std::max(2.1, 4.0 * g.T);
  e.box = make_box(e.L, g.h, cfg.n_image);
  e.grid = DualGrid::covering(e.T_large, g.dt);
  return e;
}

}  // namespace tat
