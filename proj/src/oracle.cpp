#include "tat/oracle.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <boost/multiprecision/mpfr.hpp>

#include "tat/fft.hpp"
#include "tat/log.hpp"

namespace tat {

namespace {

int wrap(int i, int n) {
  int r = i % n;
  return r < 0 ? r + n : r;
}

void catmull_rom(double t, double w[4]) {
  const double t2 = t * t, t3 = t2 * t;
  w[0] = 0.5 * (-t3 + 2 * t2 - t);
  w[1] = 0.5 * (3 * t3 - 5 * t2 + 2);
  w[2] = 0.5 * (-3 * t3 + 4 * t2 + t);
  w[3] = 0.5 * (t3 - t2);
}

// Bicubic value of a wrapped-layout field at (x, y) given in units of h.
double bicubic(const Array2D<double>& p, double x, double y) {
  const int N = static_cast<int>(p.rows());
  const double fx = std::floor(x), fy = std::floor(y);
  double wx[4], wy[4];
  catmull_rom(x - fx, wx);
  catmull_rom(y - fy, wy);
  const int ix = static_cast<int>(fx), iy = static_cast<int>(fy);
  double s = 0.0;
  for (int a = 0; a < 4; ++a) {
    const int r = wrap(iy - 1 + a, N);
    double row = 0.0;
    for (int b = 0; b < 4; ++b) row += wx[b] * p(r, wrap(ix - 1 + b, N));
    s += wy[a] * row;
  }
  return s;
}

}  // namespace

Sinogram slow_forward(const ImageGrid& f, const GeometryConfig& cfg) {
  cfg.validate();
  const int n = f.n();
  if (n < 3 || n % 2 == 0 || static_cast<int>(f.values.cols()) != n)
    throw GeometryError("slow_forward: image must be square with odd size");
  const double h = f.spacing;
  if (std::abs(h - 2.0 * cfg.half_width / (n - 1)) > 1e-9 * h)
    throw GeometryError("slow_forward: image does not cover the configured square");
  for (double v : f.values.flat())
    if (!std::isfinite(v)) throw GeometryError("slow_forward: non-finite image value");

  const double R = cfg.detector_radius;
  const double c = cfg.sound_speed;
  const double L = std::max(0.5 * c * cfg.T + 1.1 * R, cfg.half_width + R);
  const auto box = make_box(L, h, n);
  const int N = box.N;
  const int half = N / 2 + 1;
  const auto ext = embed(f, box);

  Fft2D fft(N);
  Array2D<cplx> F(N, half);
  fft.forward(ext.data(), F.data());
  const double norm = 1.0 / (static_cast<double>(N) * N);
  for (auto& v : F.flat()) v *= norm;

  // per-node phase step θ = c|ξ|dt; cos(mθ) by the Chebyshev recurrence,
  // refreshed periodically from std::cos to bound drift
  const double dxi = box.dxi();
  const double dt = cfg.dt();
  Array2D<double> theta(N, half), cprev(N, half), ccur(N, half, 1.0);
  for (int q2 = 0; q2 < N; ++q2) {
    const double v = q2 < N / 2 ? q2 : q2 - N;
    for (int q1 = 0; q1 < half; ++q1)
      theta(q2, q1) = c * dt * dxi * std::sqrt(static_cast<double>(q1) * q1 + v * v);
  }

  Sinogram g = Sinogram::for_config(cfg);
  std::vector<double> dx(cfg.n_theta), dy(cfg.n_theta);
  for (int l = 0; l < cfg.n_theta; ++l) {
    dx[l] = R * std::cos(cfg.theta(l)) / h;
    dy[l] = R * std::sin(cfg.theta(l)) / h;
  }

  Array2D<cplx> work(N, half);
  Array2D<double> p(N, N);
  auto th = theta.flat();
  auto cp = cprev.flat();
  auto cc = ccur.flat();
  constexpr int kReseed = 64;
  for (int m = 0; m < cfg.n_time; ++m) {
    if (m > 0) {
      if (m % kReseed == 0) {
        for (std::size_t i = 0; i < th.size(); ++i) {
          cp[i] = std::cos((m - 1) * th[i]);
          cc[i] = std::cos(m * th[i]);
        }
      } else if (m == 1) {
        for (std::size_t i = 0; i < th.size(); ++i) {
          cp[i] = 1.0;
          cc[i] = std::cos(th[i]);
        }
      } else {
        for (std::size_t i = 0; i < th.size(); ++i) {
          const double nx = 2.0 * std::cos(th[i]) * cc[i] - cp[i];
          cp[i] = cc[i];
          cc[i] = nx;
        }
      }
    }
    auto w = work.flat();
    auto Ff = F.flat();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = Ff[i] * cc[i];
    fft.inverse(work.data(), p.data());
    for (int l = 0; l < cfg.n_theta; ++l)
      if (g.arc_mask[l]) g(m, l) = bicubic(p, dx[l], dy[l]);
  }
  return g;
}

void leapfrog_step(const Array2D<double>& prev, const Array2D<double>& cur,
                   Array2D<double>& next, double r2, const Array2D<std::uint8_t>& interior) {
  const std::size_t ny = cur.rows(), nx = cur.cols();
  for (std::size_t i = 0; i < ny; ++i) {
    for (std::size_t j = 0; j < nx; ++j) {
      if (!interior(i, j)) continue;
      const double lap = cur(i - 1, j) + cur(i + 1, j) + cur(i, j - 1) + cur(i, j + 1) - 4.0 * cur(i, j);
      next(i, j) = 2.0 * cur(i, j) - prev(i, j) + r2 * lap;
    }
  }
}

double leapfrog_energy(const Array2D<double>& prev, const Array2D<double>& cur, double h,
                       double dt, double c) {
  const std::size_t ny = cur.rows(), nx = cur.cols();
  double kin = 0.0, pot = 0.0;
  for (std::size_t i = 0; i < ny; ++i) {
    for (std::size_t j = 0; j < nx; ++j) {
      const double v = (cur(i, j) - prev(i, j)) / dt;
      kin += v * v;
      if (j + 1 < nx)
        pot += ((cur(i, j + 1) - cur(i, j)) * (prev(i, j + 1) - prev(i, j)));
      if (i + 1 < ny)
        pot += ((cur(i + 1, j) - cur(i, j)) * (prev(i + 1, j) - prev(i, j)));
    }
  }
  return 0.5 * kin * h * h + 0.5 * c * c * pot;
}

ImageGrid fd_time_reversal(const Sinogram& g, const GeometryConfig& cfg, int substeps) {
  cfg.validate();
  if (g.n_time() != cfg.n_time || g.n_theta() != cfg.n_theta)
    throw GeometryError("fd_time_reversal: sinogram shape does not match the configuration");
  if (substeps < 1) throw GeometryError("fd_time_reversal: substeps must be >= 1");
  const double h = cfg.spacing();
  const double c = cfg.sound_speed;
  const double dt = cfg.dt();
  const double dtf = dt / substeps;
  if (c * dtf > h / std::sqrt(2.0) * (1.0 + 1e-12))
    throw GeometryError("fd_time_reversal: time step violates the CFL bound");
  if (!cfg.arc.full && cfg.arc.length() < kTwoPi - 1e-12)
    warn("fd_time_reversal: data do not cover the full circle");

  const int n = cfg.n_image;
  const int ctr = (n - 1) / 2;
  const double R = cfg.detector_radius;
  Array2D<std::uint8_t> interior(n, n, 0);
  struct Node {
    std::size_t idx;
    int l0, l1;
    double w;
  };
  std::vector<Node> bnd;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x = (j - ctr) * h, y = (i - ctr) * h;
      if (std::hypot(x, y) < R * (1.0 - 1e-12) && i > 0 && j > 0 && i < n - 1 && j < n - 1) {
        interior(i, j) = 1;
        continue;
      }
      double th = std::atan2(y, x);
      if (th < 0) th += kTwoPi;
      const double s = th / kTwoPi * cfg.n_theta;
      const int l0 = static_cast<int>(std::floor(s)) % cfg.n_theta;
      bnd.push_back({static_cast<std::size_t>(i) * n + j, l0, (l0 + 1) % cfg.n_theta,
                     s - std::floor(s)});
    }
  }

  auto boundary_values = [&](double t, Array2D<double>& p) {
    double s = t / dt;
    s = std::clamp(s, 0.0, static_cast<double>(cfg.n_time - 1));
    int m0 = static_cast<int>(std::floor(s));
    if (m0 >= cfg.n_time - 1) m0 = cfg.n_time - 2;
    const double a = s - m0;
    for (const auto& b : bnd) {
      const double v0 = (1 - b.w) * g(m0, b.l0) + b.w * g(m0, b.l1);
      const double v1 = (1 - b.w) * g(m0 + 1, b.l0) + b.w * g(m0 + 1, b.l1);
      p.data()[b.idx] = (1 - a) * v0 + a * v1;
    }
  };

  const double r2 = (c * dtf / h) * (c * dtf / h);
  const int steps = (cfg.n_time - 1) * substeps;
  Array2D<double> prev(n, n), cur(n, n), next(n, n);
  boundary_values(cfg.T, prev);
  boundary_values(cfg.T - dtf, cur);
  for (int s = 1; s < steps; ++s) {
    boundary_values(cfg.T - (s + 1) * dtf, next);
    leapfrog_step(prev, cur, next, r2, interior);
    std::swap(prev, cur);
    std::swap(cur, next);
  }

  ImageGrid out = ImageGrid::for_config(cfg);
  const auto mask = disk_mask(n, h, cfg.support_radius);
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values.data()[i] = mask.data()[i] ? cur.data()[i] : 0.0;
  return out;
}

double dot_discrepancy(const ImageGrid& f, const Sinogram& g, const ForwardPlan& fwd,
                       const AdjointPlan& adj) {
  const auto Af = forward(f, fwd);
  const auto Atg = adjoint(g, adj);
  const double R = fwd.cfg.detector_radius;
  const double lhs = sinogram_inner(Af, g, R);
  const double rhs = image_inner(f, Atg);
  const double scale = std::sqrt(sinogram_inner(Af, Af, R) * sinogram_inner(g, g, R));
  if (scale == 0.0) return std::abs(lhs - rhs);
  return std::abs(lhs - rhs) / scale;
}

ImageGrid random_image(const GeometryConfig& cfg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  ImageGrid f = ImageGrid::for_config(cfg);
  const auto mask = disk_mask(cfg.n_image, cfg.spacing(), cfg.support_radius);
  for (std::size_t i = 0; i < f.values.size(); ++i)
    f.values.data()[i] = mask.data()[i] ? nd(rng) : 0.0;
  return f;
}

Sinogram random_sinogram(const GeometryConfig& cfg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Sinogram g = Sinogram::for_config(cfg);
  for (int m = 0; m < g.n_time(); ++m)
    for (int l = 0; l < g.n_theta(); ++l) g(m, l) = g.arc_mask[l] ? nd(rng) : 0.0;
  return g;
}

GeometryConfig refined(const GeometryConfig& cfg) {
  GeometryConfig r = cfg;
  r.n_image = 2 * cfg.n_image - 1;
  r.n_theta = 2 * cfg.n_theta;
  r.n_time = 2 * cfg.n_time - 1;
  return r;
}

void to_json(nlohmann::json& j, const DotTestReport& r) {
  j = nlohmann::json{{"trials", r.trials},         {"max_coarse", r.max_coarse},
                     {"mean_coarse", r.mean_coarse}, {"max_fine", r.max_fine},
                     {"mean_fine", r.mean_fine},     {"ratio", r.ratio}};
}

DotTestReport dense_dot_test(const GeometryConfig& cfg, int trials, std::uint64_t seed,
                             const PlanOptions& opt) {
  if (trials < 1) throw std::invalid_argument("dense_dot_test: trials must be >= 1");
  DotTestReport rep;
  rep.trials = trials;
  auto run = [&](const GeometryConfig& c, double& mx, double& mean) {
    const auto fwd = make_forward_plan(c, opt);
    const auto adj = make_adjoint_plan(c, opt);
    mx = 0.0;
    mean = 0.0;
    for (int t = 0; t < trials; ++t) {
      const auto f = random_image(c, seed + 2 * static_cast<std::uint64_t>(t));
      const auto g = random_sinogram(c, seed + 2 * static_cast<std::uint64_t>(t) + 1);
      const double d = dot_discrepancy(f, g, fwd, adj);
      mx = std::max(mx, d);
      mean += d / trials;
    }
  };
  run(cfg, rep.max_coarse, rep.mean_coarse);
  run(refined(cfg), rep.max_fine, rep.mean_fine);
  rep.ratio = rep.max_coarse > 0 ? rep.max_fine / rep.max_coarse : 0.0;
  return rep;
}

double bessel_series_reference(double lambda, int k) {
  using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<250>>;
  if (lambda < 0 || k < 0) throw std::invalid_argument("bessel_series_reference: bad arguments");
  const Real half = Real(lambda) / 2;
  const Real q = -half * half;
  Real term = 1;
  for (int i = 1; i <= k; ++i) term *= half / i;
  Real sum = term;
  const Real tiny("1e-60");
  for (int m = 1;; ++m) {
    term *= q / (Real(m) * (m + k));
    sum += term;
    if (m > half && abs(term) < tiny) break;
  }
  return sum.convert_to<double>();
}

}  // namespace tat
