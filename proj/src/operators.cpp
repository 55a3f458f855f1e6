#include "tat/operators.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "tat/log.hpp"

namespace tat {

namespace {

// i^k for k >= 0
cplx ipow(int k) {
  switch (k & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

int mod(int a, int n) {
  int r = a % n;
  return r < 0 ? r + n : r;
}

void check_options(const PlanOptions& o) {
  if (o.angular_oversampling < 1) throw GeometryError("angular_oversampling must be >= 1");
  if (o.graded_node_factor < 1) throw GeometryError("graded_node_factor must be >= 1");
}

void check_image(const ImageGrid& f, const GeometryConfig& cfg, const char* who) {
  if (f.n() != cfg.n_image || static_cast<int>(f.values.cols()) != cfg.n_image)
    throw GeometryError(std::string(who) + ": image size does not match the plan");
  if (std::abs(f.spacing - cfg.spacing()) > 1e-9 * cfg.spacing())
    throw GeometryError(std::string(who) + ": image spacing does not match the plan");
  for (double v : f.values.flat())
    if (!std::isfinite(v)) throw GeometryError(std::string(who) + ": non-finite image value");
}

void check_sinogram(const Sinogram& g, const GeometryConfig& cfg, const char* who) {
  if (g.n_time() != cfg.n_time || g.n_theta() != cfg.n_theta)
    throw GeometryError(std::string(who) + ": sinogram shape does not match the plan");
  if (std::abs(g.dt - cfg.dt()) > 1e-9 * cfg.dt())
    throw GeometryError(std::string(who) + ": sinogram time step does not match the plan");
  for (double v : g.values.flat())
    if (!std::isfinite(v)) throw GeometryError(std::string(who) + ": non-finite sinogram value");
}

// Largest imaginary part that a real-valued result may carry at the DC and
// Nyquist bins before the harmonic bookkeeping is considered broken.
void check_real_bins(const Array2D<cplx>& b, int nyq) {
  double big = 0.0, res = 0.0;
  for (std::size_t m = 0; m < b.rows(); ++m) {
    for (std::size_t c = 0; c < b.cols(); ++c) big = std::max(big, std::abs(b(m, c)));
    res = std::max({res, std::abs(b(m, 0).imag()), std::abs(b(m, nyq).imag())});
  }
  if (res > 1e-6 * big) throw std::runtime_error("imaginary residue in a real-valued transform");
}

BackprojectionPlan make_core(const GeometryConfig& cfg, const PlanOptions& opt, bool prime) {
  cfg.validate();
  check_options(opt);
  BackprojectionPlan p;
  p.cfg = cfg;
  p.geo = NormalizedGeometry::from(cfg);
  p.ext = adjoint_extent(cfg);
  p.options = opt;
  p.n_phi = opt.angular_oversampling * cfg.n_theta;
  p.P = p.n_phi / 2;
  const int M = p.ext.grid.M;
  p.lambda.resize(M + 1);
  for (int j = 0; j <= M; ++j) p.lambda[j] = p.ext.grid.lambda(j);
  p.bessel = make_bessel_table(p.lambda, p.P, prime);
  p.arc = arc_mask(cfg);
  p.support = disk_mask(cfg.n_image, cfg.spacing(), cfg.support_radius);
  p.fft = Fft2D(p.ext.box.N);
  p.phi_ifft = RowFftComplex(M + 1, p.n_phi, FFTW_BACKWARD);
  p.dual = DualTransform(p.P + 1, M);
  p.theta_fft = RowFftReal(cfg.n_time, cfg.n_theta);
  return p;
}

enum class Kernel { adjoint, inverse };

// Shared body of A* and the inverse up to the extended-grid field.
Array2D<double> backproject(const Sinogram& g, const BackprojectionPlan& p, Kernel kernel) {
  const auto& cfg = p.cfg;
  const int nt = cfg.n_time;
  const int nth = cfg.n_theta;
  const int M = p.ext.grid.M;
  const int P = p.P;

  Array2D<double> a(nt, nth);
  const auto w = trapezoid_weights(nt);
  bool off_arc = false;
  for (int m = 0; m < nt; ++m) {
    for (int l = 0; l < nth; ++l) {
      double v = g(m, l);
      if (!p.arc[l]) {
        if (v != 0.0) off_arc = true;
        v = 0.0;
      }
      a(m, l) = v * w[m] * p.geo.dt;
    }
  }
  if (off_arc) warn("data outside the detector arc were set to zero");

  // A* keeps every harmonic the forward fold produces, so aliased data bins
  // feed |k| > n_theta/2 as the exact transpose would; the inverse treats the
  // data as a trigonometric interpolant and stops at n_theta/2
  const int K = kernel == Kernel::adjoint ? P : std::min(P, nth / 2);
  const auto c = angular_fft(a, p.theta_fft);
  Array2D<cplx> H(P + 1, M + 1);
  for (int k = 0; k <= K; ++k) {
    const double wk = k == K ? 0.5 : 1.0;
    const int b = k % nth;
    auto row = H.row(k);
    for (int m = 0; m < nt; ++m)
      row[m] = wk * (b <= nth / 2 ? c(m, b) : std::conj(c(m, nth - b)));
  }

  Array2D<cplx> G;
  if (kernel == Kernel::adjoint)
    p.dual.cosine_plain(H, G, 1.0);
  else
    p.dual.sine(H, G, 1.0);

  const auto& J = kernel == Kernel::adjoint ? p.bessel.j : p.bessel.jprime;
  const double factor = kernel == Kernel::adjoint ? 1.0 : -2.0;
  Array2D<cplx> pol(M + 1, p.n_phi);
  for (int k = 0; k <= P; ++k) {
    const cplx ck = factor * std::conj(ipow(k));  // (-i)^k
    const double sgn = (k % 2) ? -1.0 : 1.0;
    const int b1 = mod(k, p.n_phi);
    const int b2 = mod(-k, p.n_phi);
    for (int j = 0; j <= M; ++j) {
      const cplx u = ck * J(k, j) * G(k, j);
      pol(j, b1) += u;
      if (k > 0) pol(j, b2) += sgn * std::conj(u);
    }
  }
  PolarSpectrum polar;
  polar.n_phi = p.n_phi;
  polar.lambda = p.lambda;
  polar.values = Array2D<cplx>(M + 1, p.n_phi);
  p.phi_ifft.execute(pol.data(), polar.values.data());

  auto cart = resample_polar_to_cart(polar, p.ext.box);
  return ifft2_continuous(cart, p.fft);
}

ImageGrid finish_image(const Array2D<double>& v, const BackprojectionPlan& p, double shift,
                       double scale) {
  ImageGrid out = restrict_to_image(v, p.ext.box, p.cfg.n_image);
  out.spacing = p.cfg.spacing();
  auto vals = out.values.flat();
  auto mask = p.support.flat();
  for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = mask[i] ? (vals[i] + shift) * scale : 0.0;
  return out;
}

}  // namespace

void to_json(nlohmann::json& j, const PlanOptions& o) {
  j = nlohmann::json{{"angular_oversampling", o.angular_oversampling},
                     {"graded_node_factor", o.graded_node_factor}};
}

void from_json(const nlohmann::json& j, PlanOptions& o) {
  PlanOptions d;
  o.angular_oversampling = j.value("angular_oversampling", d.angular_oversampling);
  o.graded_node_factor = j.value("graded_node_factor", d.graded_node_factor);
}

ForwardPlan make_forward_plan(const GeometryConfig& cfg, const PlanOptions& opt) {
  cfg.validate();
  check_options(opt);
  ForwardPlan p;
  p.cfg = cfg;
  p.geo = NormalizedGeometry::from(cfg);
  p.ext = forward_extent(cfg);
  p.options = opt;
  p.n_phi = opt.angular_oversampling * cfg.n_theta;
  p.P = p.n_phi / 2;
  p.lambda_cut = kPi / p.geo.h;
  const auto& grid = p.ext.grid;
  const int M = grid.M;
  p.lambda.resize(M + 1);
  for (int j = 0; j <= M; ++j) p.lambda[j] = grid.lambda(j);
  p.bessel = make_bessel_table(p.lambda, p.P);

  const double graded_max = std::min(grid.lambda_max(), p.lambda_cut);
  p.graded = graded_rule(graded_max, opt.graded_node_factor * (M + 1));
  p.graded_bessel = make_bessel_table(p.graded.nodes, 1);
  std::vector<double> times(cfg.n_time);
  for (int m = 0; m < cfg.n_time; ++m) times[m] = m * p.geo.dt;
  p.graded_cos = GradedCosine(p.graded, times);

  p.arc = arc_mask(cfg);
  p.support = disk_mask(cfg.n_image, cfg.spacing(), cfg.support_radius);
  p.fft = Fft2D(p.ext.box.N);
  p.phi_fft = RowFftComplex(M + 1, p.n_phi, FFTW_FORWARD);
  p.dual = DualTransform(p.P + 1, M);
  p.theta_fft = RowFftReal(cfg.n_time, cfg.n_theta);
  return p;
}

AdjointPlan make_adjoint_plan(const GeometryConfig& cfg, const PlanOptions& opt) {
  return AdjointPlan{make_core(cfg, opt, false)};
}

InversePlan make_inverse_plan(const GeometryConfig& cfg, const PlanOptions& opt) {
  InversePlan p{make_core(cfg, opt, true), {}};
  const auto& box = p.core.ext.box;
  const double inner = p.core.geo.support * (1.0 - 1e-12);
  const double outer = 1.0 + 1e-12;
  for (int py = 0; py < box.N; ++py) {
    const double y = box.coord(py);
    for (int px = 0; px < box.N; ++px) {
      const double r = std::hypot(box.coord(px), y);
      if (r >= inner && r <= outer) p.annulus.push_back(static_cast<std::size_t>(py) * box.N + px);
    }
  }
  return p;
}

Sinogram forward(const ImageGrid& f, const ForwardPlan& plan) {
  const auto& cfg = plan.cfg;
  check_image(f, cfg, "forward");
  double outside = 0.0;
  auto vals = f.values.flat();
  auto mask = plan.support.flat();
  for (std::size_t i = 0; i < vals.size(); ++i)
    if (!mask[i]) outside = std::max(outside, std::abs(vals[i]));
  if (outside > 1e-12) {
    std::ostringstream os;
    os << "forward: image is nonzero outside the support disk (max " << outside << ")";
    warn(os.str());
  }

  const int M = plan.ext.grid.M;
  const int P = plan.P;
  const int nphi = plan.n_phi;
  const int nt = cfg.n_time;
  const int nth = cfg.n_theta;

  ImageGrid fn = f;
  fn.spacing = plan.geo.h;
  const auto ext = embed(fn, plan.ext.box);
  const auto spec = fft2_continuous(ext, plan.ext.box, plan.fft);
  auto polar = resample_cart_to_polar(spec, plan.lambda, nphi, plan.lambda_cut);

  Array2D<cplx> coef(M + 1, nphi);
  plan.phi_fft.execute(polar.values.data(), coef.data());
  const double inv_phi = 1.0 / nphi;

  Array2D<cplx> H(P + 1, M + 1);
  for (int k = 0; k <= P; ++k) {
    const cplx ik = ipow(k) * inv_phi;
    auto row = H.row(k);
    for (int j = 0; j <= M; ++j) row[j] = ik * plan.lambda[j] * plan.bessel.j(k, j) * coef(j, k);
  }
  Array2D<cplx> G;
  plan.dual.cosine(H, G, plan.ext.grid.dlambda);

  // |k| <= 1 from the graded rule; the uniform rule periodizes their slowly
  // decaying tails in time
  {
    const auto& nodes = plan.graded.nodes;
    const double inv = 1.0 / plan.ext.box.dxi();
    std::vector<double> cs(nphi), sn(nphi);
    for (int l = 0; l < nphi; ++l) {
      cs[l] = std::cos(kTwoPi * l / nphi);
      sn[l] = std::sin(kTwoPi * l / nphi);
    }
    std::vector<cplx> phi0(nodes.size()), phi1(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double lam = nodes[i];
      cplx s0 = 0.0, s1 = 0.0;
      if (lam == 0.0) {
        s0 = spec.values(0, 0) * static_cast<double>(nphi);
      } else {
        const double r = lam * inv;
        for (int l = 0; l < nphi; ++l) {
          const cplx v = cartesian_lookup(spec, r * cs[l], r * sn[l]);
          s0 += v;
          s1 += v * cplx(cs[l], -sn[l]);
        }
      }
      phi0[i] = lam * plan.graded_bessel.j(0, i) * s0 * inv_phi;
      phi1[i] = ipow(1) * lam * plan.graded_bessel.j(1, i) * s1 * inv_phi;
    }
    std::vector<cplx> out(nt);
    plan.graded_cos.apply(phi0, out);
    for (int m = 0; m < nt; ++m) G(0, m) = out[m];
    if (P >= 1) {
      plan.graded_cos.apply(phi1, out);
      for (int m = 0; m < nt; ++m) G(1, m) = out[m];
    }
  }

  const int half = nth / 2;
  Array2D<cplx> B(nt, half + 1);
  for (int k = -P; k <= P; ++k) {
    const int b = mod(k, nth);
    if (b > half) continue;
    const double wk = std::abs(k) == P ? 0.5 : 1.0;
    const int ka = std::abs(k);
    for (int m = 0; m < nt; ++m) {
      const cplx v = k >= 0 ? G(ka, m) : std::conj(G(ka, m));
      B(m, b) += wk * v;
    }
  }
  check_real_bins(B, half);

  Sinogram g = Sinogram::for_config(cfg);
  g.values = angular_ifft(B, plan.theta_fft);
  restrict_to_arc(g);
  return g;
}

ImageGrid adjoint(const Sinogram& g, const AdjointPlan& plan) {
  const auto& p = plan.core;
  check_sinogram(g, p.cfg, "adjoint");
  const auto v = backproject(g, p, Kernel::adjoint);
  return finish_image(v, p, 0.0, 1.0 / p.cfg.sound_speed);
}

ImageGrid inverse(const Sinogram& g, const InversePlan& plan) {
  const auto& p = plan.core;
  check_sinogram(g, p.cfg, "inverse");
  const auto v = backproject(g, p, Kernel::inverse);
  double sum = 0.0;
  for (std::size_t i : plan.annulus) sum += v.data()[i];
  const double C = plan.annulus.empty() ? 0.0 : -sum / plan.annulus.size();
  return finish_image(v, p, C, 1.0);
}

void restrict_to_arc(Sinogram& g) {
  if (g.arc_mask.empty()) return;
  for (int m = 0; m < g.n_time(); ++m) {
    auto row = g.values.row(m);
    for (int l = 0; l < g.n_theta(); ++l)
      if (!g.arc_mask[l]) row[l] = 0.0;
  }
}

void DegradationSpec::validate(int n_time) const {
  if (!std::isfinite(gamma) || gamma < 0) throw GeometryError("degradation: gamma must be >= 0");
  if (!eta.empty() && static_cast<int>(eta.size()) != n_time + 1)
    throw GeometryError("degradation: eta must have n_time + 1 samples");
  for (const auto& e : eta)
    if (!std::isfinite(e.real()) || !std::isfinite(e.imag()))
      throw GeometryError("degradation: eta must be finite");
}

void to_json(nlohmann::json& j, const DegradationSpec& d) {
  nlohmann::json eta = nlohmann::json::array();
  for (const auto& e : d.eta) eta.push_back({e.real(), e.imag()});
  j = nlohmann::json{{"gamma", d.gamma}, {"eta", eta}};
}

void from_json(const nlohmann::json& j, DegradationSpec& d) {
  d.gamma = j.value("gamma", 0.0);
  d.eta.clear();
  if (j.contains("eta")) {
    for (const auto& e : j.at("eta")) {
      if (e.is_array())
        d.eta.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
      else
        d.eta.emplace_back(e.get<double>(), 0.0);
    }
  } else if (j.contains("window")) {
    const auto& w = j.at("window");
    const auto type = w.at("type").get<std::string>();
    const int n = j.at("n_time").get<int>();
    if (type != "gaussian") throw GeometryError("degradation: unknown window " + type);
    const double sigma = w.at("sigma").get<double>();
    if (!(sigma > 0)) throw GeometryError("degradation: window sigma must be positive");
    for (int b = 0; b <= n; ++b) {
      const double x = static_cast<double>(b) / n / sigma;
      d.eta.emplace_back(std::exp(-0.5 * x * x), 0.0);
    }
  }
}

namespace {

enum class Direction { apply, adjoint };

Sinogram filter_traces(const Sinogram& g, const DegradationSpec& spec, Direction dir) {
  const int nt = g.n_time();
  const int nth = g.n_theta();
  spec.validate(nt);
  std::vector<double> att(nt);
  for (int m = 0; m < nt; ++m) att[m] = std::exp(-spec.gamma * g.time(m));

  Sinogram out = g;
  if (!spec.eta.empty()) {
    const int len = 2 * nt;
    RowFftReal fft(nth, len);
    Array2D<double> traces(nth, len);
    for (int m = 0; m < nt; ++m)
      for (int l = 0; l < nth; ++l)
        traces(l, m) = dir == Direction::apply ? g(m, l) * att[m] : g(m, l);
    Array2D<cplx> spec_t(nth, fft.half());
    fft.forward(traces.data(), spec_t.data());
    for (int l = 0; l < nth; ++l) {
      for (int b = 0; b <= nt; ++b) {
        cplx e = spec.eta[b];
        if (b == 0 || b == nt) e = e.real();
        spec_t(l, b) *= dir == Direction::apply ? e : std::conj(e);
      }
    }
    fft.inverse(spec_t.data(), traces.data());
    const double s = 1.0 / len;
    for (int m = 0; m < nt; ++m)
      for (int l = 0; l < nth; ++l) out(m, l) = traces(l, m) * s;
    if (dir == Direction::adjoint)
      for (int m = 0; m < nt; ++m)
        for (int l = 0; l < nth; ++l) out(m, l) *= att[m];
  } else {
    for (int m = 0; m < nt; ++m)
      for (int l = 0; l < nth; ++l) out(m, l) = g(m, l) * att[m];
  }
  restrict_to_arc(out);
  return out;
}

}  // namespace

Sinogram degrade(const Sinogram& g, const DegradationSpec& spec) {
  return filter_traces(g, spec, Direction::apply);
}

Sinogram degrade_adjoint(const Sinogram& g, const DegradationSpec& spec) {
  return filter_traces(g, spec, Direction::adjoint);
}

double operator_norm(const ForwardPlan& fwd, const AdjointPlan& adj, int iters,
                     std::uint64_t seed) {
  if (iters < 10) throw std::invalid_argument("operator_norm: needs at least 10 iterations");
  const auto& cfg = fwd.cfg;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  ImageGrid x = ImageGrid::for_config(cfg);
  auto mask = fwd.support.flat();
  auto xv = x.values.flat();
  for (std::size_t i = 0; i < xv.size(); ++i) xv[i] = mask[i] ? nd(rng) : 0.0;
  double est = 0.0;
  for (int it = 0; it < iters; ++it) {
    const double nx = std::sqrt(image_inner(x, x));
    for (auto& v : x.values.flat()) v /= nx;
    const auto y = forward(x, fwd);
    est = std::sqrt(sinogram_inner(y, y, cfg.detector_radius));
    x = adjoint(y, adj);
  }
  return est;
}

}  // namespace tat
