#include "tat/recon.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "tat/phantom.hpp"

namespace tat {

namespace {

using Clock = std::chrono::steady_clock;

double norm2(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

double diff_norm(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

Sinogram residual(const ImageGrid& f, const Sinogram& g, const ForwardPlan& fwd) {
  Sinogram r = forward(f, fwd);
  auto rv = r.values.flat();
  auto gv = g.values.flat();
  for (std::size_t i = 0; i < rv.size(); ++i) rv[i] -= gv[i];
  restrict_to_arc(r);
  return r;
}

double resolve_norm(const ReconConfig& cfg, const ForwardPlan& fwd, const AdjointPlan& adj) {
  if (cfg.operator_norm > 0) return cfg.operator_norm;
  return operator_norm(fwd, adj, cfg.norm_iters, cfg.norm_seed);
}

void finish(ReconResult& res, const ImageGrid* truth) {
  if (!truth) return;
  const auto m = metrics(res.f, *truth);
  res.trace.rel_l2 = m.rel_l2;
  res.trace.rel_linf = m.rel_linf;
}

void check_data(const Sinogram& g, const ForwardPlan& fwd) {
  if (g.n_time() != fwd.cfg.n_time || g.n_theta() != fwd.cfg.n_theta)
    throw GeometryError("recon: data shape does not match the plan");
}

}  // namespace

void ReconConfig::validate() const {
  if (method == ReconMethod::tv && !(alpha >= 0)) throw std::invalid_argument("recon: alpha must be >= 0");
  if (step_primal < 0 || step_dual < 0) throw std::invalid_argument("recon: steps must be >= 0");
  if (!(relaxation >= 0 && relaxation <= 1)) throw std::invalid_argument("recon: relaxation must lie in [0, 1]");
  if (max_iters < 1) throw std::invalid_argument("recon: max_iters must be >= 1");
  if (!(stop_rel > 0 && stop_rel < 1)) throw std::invalid_argument("recon: stop_rel must lie in (0, 1)");
  if (inner_prox_iters < 0) throw std::invalid_argument("recon: inner_prox_iters must be >= 0");
  if (roi != "support" && roi != "upper_half") throw std::invalid_argument("recon: unknown roi " + roi);
}

void to_json(nlohmann::json& j, const ReconConfig& c) {
  j = nlohmann::json{{"method", c.method == ReconMethod::tv ? "tv" : "nnls"},
                     {"alpha", c.alpha},
                     {"step_primal", c.step_primal},
                     {"step_dual", c.step_dual},
                     {"relaxation", c.relaxation},
                     {"max_iters", c.max_iters},
                     {"stop_rel", c.stop_rel},
                     {"roi", c.roi},
                     {"inner_prox_iters", c.inner_prox_iters},
                     {"norm_iters", c.norm_iters},
                     {"norm_seed", c.norm_seed},
                     {"operator_norm", c.operator_norm}};
}

void from_json(const nlohmann::json& j, ReconConfig& c) {
  ReconConfig d;
  const auto m = j.value("method", std::string("nnls"));
  if (m == "nnls")
    c.method = ReconMethod::nnls;
  else if (m == "tv")
    c.method = ReconMethod::tv;
  else
    throw std::invalid_argument("recon: unknown method " + m);
  c.alpha = j.value("alpha", d.alpha);
  c.step_primal = j.value("step_primal", d.step_primal);
  c.step_dual = j.value("step_dual", d.step_dual);
  c.relaxation = j.value("relaxation", d.relaxation);
  c.max_iters = j.value("max_iters", d.max_iters);
  c.stop_rel = j.value("stop_rel", d.stop_rel);
  c.roi = j.value("roi", d.roi);
  c.inner_prox_iters = j.value("inner_prox_iters", d.inner_prox_iters);
  c.norm_iters = j.value("norm_iters", d.norm_iters);
  c.norm_seed = j.value("norm_seed", d.norm_seed);
  c.operator_norm = j.value("operator_norm", d.operator_norm);
}

std::string IterationTrace::to_csv() const {
  std::ostringstream os;
  os.precision(10);
  os << "iteration,objective,update_norm,seconds\n";
  for (const auto& r : records)
    os << r.iteration << ',' << r.objective << ',' << r.update_norm << ',' << r.seconds << '\n';
  return os.str();
}

void to_json(nlohmann::json& j, const IterationTrace& t) {
  j = nlohmann::json{{"iterations", t.iterations},
                     {"converged", t.converged},
                     {"operator_norm", t.operator_norm}};
  if (t.rel_l2 >= 0) {
    j["rel_l2"] = t.rel_l2;
    j["rel_linf"] = t.rel_linf;
  }
}

Array2D<std::uint8_t> roi_mask(const std::string& name, const GeometryConfig& geo) {
  if (name == "support") return disk_mask(geo.n_image, geo.spacing(), geo.support_radius);
  if (name == "upper_half") return upper_half_mask(geo);
  throw std::invalid_argument("unknown roi " + name);
}

ReconResult nnls(const Sinogram& g, const ReconConfig& cfg, const ForwardPlan& fwd,
                 const AdjointPlan& adj, const ImageGrid* truth) {
  cfg.validate();
  check_data(g, fwd);
  const auto start = Clock::now();
  const double L = resolve_norm(cfg, fwd, adj);
  const double step = cfg.step_primal > 0 ? cfg.step_primal : 0.9 / (L * L);
  const auto roi = roi_mask(cfg.roi, fwd.cfg);
  const double R = fwd.cfg.detector_radius;

  ReconResult res{ImageGrid::for_config(fwd.cfg), {}};
  res.trace.operator_norm = L;
  auto& f = res.f;
  double ref = 0.0;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    const auto r = residual(f, g, fwd);
    const double obj = sinogram_inner(r, r, R);
    const auto gradient = adjoint(r, adj);
    ImageGrid next = f;
    auto nv = next.values.flat();
    auto gv = gradient.values.flat();
    auto mv = roi.flat();
    for (std::size_t i = 0; i < nv.size(); ++i)
      nv[i] = mv[i] ? std::max(0.0, nv[i] - step * gv[i]) : 0.0;
    const double upd = diff_norm(nv, f.values.flat());
    if (it == 1) ref = norm2(nv);
    f = std::move(next);
    res.trace.records.push_back(
        {it, obj, upd, std::chrono::duration<double>(Clock::now() - start).count()});
    res.trace.iterations = it;
    if (ref == 0.0 || upd < cfg.stop_rel * ref) {
      res.trace.converged = true;
      break;
    }
  }
  finish(res, truth);
  return res;
}

ReconResult tv_pdhg(const Sinogram& g, const ReconConfig& cfg, const ForwardPlan& fwd,
                    const AdjointPlan& adj, const ImageGrid* truth) {
  cfg.validate();
  check_data(g, fwd);
  const auto start = Clock::now();
  const double L = resolve_norm(cfg, fwd, adj);
  const double sigma = cfg.step_dual > 0 ? cfg.step_dual : 0.9 / L;
  const double lam = cfg.step_primal > 0 ? cfg.step_primal : 0.9 / L;
  if (!(sigma * lam * L * L < 1.0))
    throw std::invalid_argument("tv_pdhg: steps violate σ·λ·‖A‖² < 1");
  const auto roi = roi_mask(cfg.roi, fwd.cfg);
  const double R = fwd.cfg.detector_radius;
  const double h = fwd.cfg.spacing();
  // TV of the continuous image is h·Σ|Df| with D the unit-spacing difference,
  // and the primal norm carries h², so the discrete prox weight is αλ/h
  const double tau = cfg.alpha * lam / h;

  ReconResult res{ImageGrid::for_config(fwd.cfg), {}};
  res.trace.operator_norm = L;
  auto& f = res.f;
  ImageGrid fbar = f;
  Sinogram q = Sinogram::for_config(fwd.cfg);
  const int n = fwd.cfg.n_image;
  VectorField dual{Array2D<double>(n, n), Array2D<double>(n, n)};
  double ref = 0.0;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    const auto r = residual(fbar, g, fwd);
    auto qv = q.values.flat();
    auto rv = r.values.flat();
    for (std::size_t i = 0; i < qv.size(); ++i) qv[i] = (qv[i] + sigma * rv[i]) / (1.0 + sigma);
    const auto aq = adjoint(q, adj);
    Array2D<double> z = f.values;
    auto zv = z.flat();
    auto av = aq.values.flat();
    for (std::size_t i = 0; i < zv.size(); ++i) zv[i] -= lam * av[i];
    Array2D<double> next =
        tau > 0 ? tv_prox(z, tau, cfg.inner_prox_iters, &dual) : std::move(z);
    auto nv = next.flat();
    auto mv = roi.flat();
    for (std::size_t i = 0; i < nv.size(); ++i)
      if (!mv[i]) nv[i] = 0.0;
    const double upd = diff_norm(nv, f.values.flat());
    if (it == 1) ref = norm2(nv);
    auto bv = fbar.values.flat();
    auto fv = f.values.flat();
    for (std::size_t i = 0; i < nv.size(); ++i) bv[i] = nv[i] + cfg.relaxation * (nv[i] - fv[i]);
    f.values = std::move(next);
    const double obj = 0.5 * sinogram_inner(r, r, R) + cfg.alpha * h * total_variation(f.values);
    res.trace.records.push_back(
        {it, obj, upd, std::chrono::duration<double>(Clock::now() - start).count()});
    res.trace.iterations = it;
    if (ref == 0.0 || upd < cfg.stop_rel * ref) {
      res.trace.converged = true;
      break;
    }
  }
  finish(res, truth);
  return res;
}

VectorField grad(const Array2D<double>& f) {
  const std::size_t ny = f.rows(), nx = f.cols();
  VectorField q{Array2D<double>(ny, nx), Array2D<double>(ny, nx)};
  for (std::size_t i = 0; i < ny; ++i) {
    for (std::size_t j = 0; j < nx; ++j) {
      if (j + 1 < nx) q.x(i, j) = f(i, j + 1) - f(i, j);
      if (i + 1 < ny) q.y(i, j) = f(i + 1, j) - f(i, j);
    }
  }
  return q;
}

Array2D<double> div(const VectorField& q) {
  const std::size_t ny = q.x.rows(), nx = q.x.cols();
  Array2D<double> d(ny, nx);
  for (std::size_t i = 0; i < ny; ++i) {
    for (std::size_t j = 0; j < nx; ++j) {
      double v = 0.0;
      if (j + 1 < nx) v += q.x(i, j);
      if (j > 0) v -= q.x(i, j - 1);
      if (i + 1 < ny) v += q.y(i, j);
      if (i > 0) v -= q.y(i - 1, j);
      d(i, j) = v;
    }
  }
  return d;
}

double total_variation(const Array2D<double>& f) {
  const auto q = grad(f);
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += std::hypot(q.x.data()[i], q.y.data()[i]);
  return s;
}

Array2D<double> tv_prox(const Array2D<double>& f, double tau, int iters, VectorField* dual) {
  if (tau < 0) throw std::invalid_argument("tv_prox: tau must be >= 0");
  if (tau == 0.0 || iters == 0) return f;
  const std::size_t ny = f.rows(), nx = f.cols();
  VectorField local;
  VectorField& p = dual ? *dual : local;
  if (!p.x.same_shape(f)) {
    p.x = Array2D<double>(ny, nx);
    p.y = Array2D<double>(ny, nx);
  }
  constexpr double delta = 0.125;
  const double inv_tau = 1.0 / tau;
  Array2D<double> w(ny, nx);
  for (int it = 0; it < iters; ++it) {
    const auto d = div(p);
    for (std::size_t i = 0; i < w.size(); ++i) w.data()[i] = d.data()[i] - f.data()[i] * inv_tau;
    const auto gw = grad(w);
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double px = p.x.data()[i] + delta * gw.x.data()[i];
      const double py = p.y.data()[i] + delta * gw.y.data()[i];
      const double s = std::max(1.0, std::hypot(px, py));
      p.x.data()[i] = px / s;
      p.y.data()[i] = py / s;
    }
  }
  const auto d = div(p);
  Array2D<double> u(ny, nx);
  for (std::size_t i = 0; i < u.size(); ++i) u.data()[i] = f.data()[i] - tau * d.data()[i];
  return u;
}

ImageGrid tv_prox(const ImageGrid& f, double tau, int iters) {
  ImageGrid out = f;
  out.values = tv_prox(f.values, tau, iters);
  return out;
}

Sinogram add_noise(const Sinogram& g, double level, std::uint64_t seed) {
  if (!(level >= 0)) throw std::invalid_argument("add_noise: level must be >= 0");
  if (level == 0.0) return g;
  const double gn = norm2(g.values.flat());
  if (gn == 0.0) throw std::invalid_argument("add_noise: zero signal");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Sinogram chi = g;
  chi.values.fill(0.0);
  for (int m = 0; m < g.n_time(); ++m)
    for (int l = 0; l < g.n_theta(); ++l)
      if (g.arc_mask.empty() || g.arc_mask[l]) chi(m, l) = nd(rng);
  const double s = level * gn / norm2(chi.values.flat());
  Sinogram out = g;
  auto ov = out.values.flat();
  auto cv = chi.values.flat();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] += s * cv[i];
  return out;
}

Metrics metrics(const ImageGrid& estimate, const ImageGrid& truth) {
  if (!estimate.values.same_shape(truth.values)) throw std::invalid_argument("metrics: shape mismatch");
  double d2 = 0.0, t2 = 0.0, dinf = 0.0, tinf = 0.0;
  auto e = estimate.values.flat();
  auto t = truth.values.flat();
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double d = e[i] - t[i];
    d2 += d * d;
    t2 += t[i] * t[i];
    dinf = std::max(dinf, std::abs(d));
    tinf = std::max(tinf, std::abs(t[i]));
  }
  if (t2 == 0.0) throw std::invalid_argument("metrics: zero ground truth");
  return {std::sqrt(d2 / t2), dinf / tinf};
}

}  // namespace tat
