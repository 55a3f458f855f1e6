#include "tat/bench.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "tat/fft.hpp"
#include "tat/io.hpp"
#include "tat/operators.hpp"
#include "tat/oracle.hpp"
#include "tat/phantom.hpp"
#include "tat/recon.hpp"
#include "tat/special.hpp"
#include "tat/spectral.hpp"

namespace tat {

namespace {

template <class F>
double best_of(int reps, F&& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

double rel_diff(std::span<const double> a, std::span<const double> b) {
  double d = 0.0, n = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d += (a[i] - b[i]) * (a[i] - b[i]);
    n += b[i] * b[i];
  }
  return n > 0 ? std::sqrt(d / n) : std::sqrt(d);
}

}  // namespace

GeometryConfig bench_config(int n_image) {
  GeometryConfig c;
  c.n_image = n_image;
  int nth = static_cast<int>(std::lround(360.0 * (n_image - 1) / 256.0));
  if (nth % 2) ++nth;
  c.n_theta = std::max(nth, 8);
  c.n_time = 2 * (n_image - 1) + 1;
  return c;
}

std::vector<BenchRow> run_bench(const std::vector<int>& sizes, int reps, int slow_max) {
  std::vector<BenchRow> rows;
  for (int n : sizes) {
    const auto cfg = bench_config(n);
    const auto f = paper_phantom(cfg);
    Sinogram g;
    {
      const auto fwd = make_forward_plan(cfg);
      rows.push_back({n, "forward", best_of(reps, [&] { g = forward(f, fwd); })});
    }
    {
      const auto adj = make_adjoint_plan(cfg);
      rows.push_back({n, "adjoint", best_of(reps, [&] { (void)adjoint(g, adj); })});
    }
    {
      const auto inv = make_inverse_plan(cfg);
      rows.push_back({n, "inverse", best_of(reps, [&] { (void)inverse(g, inv); })});
    }
    if (n <= slow_max)
      rows.push_back({n, "slow_forward", best_of(1, [&] { (void)slow_forward(f, cfg); })});
  }
  return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream os;
  os << "size,operator,seconds,threads\n";
  for (const auto& r : rows) os << r.size << ',' << r.op << ',' << r.seconds << ',' << fft_threads() << '\n';
  return os.str();
}

nlohmann::json run_selftest(bool small) {
  nlohmann::json rep;
  bool pass = true;
  auto check = [&](const std::string& name, double value, double limit) {
    const bool ok = std::isfinite(value) && value <= limit;
    rep["checks"][name] = {{"value", value}, {"limit", limit}, {"pass", ok}};
    pass = pass && ok;
  };

  GeometryConfig cfg;
  if (small) {
    cfg.n_image = 65;
    cfg.n_theta = 64;
    cfg.n_time = 65;
    cfg.T = 2.5;
  }
  rep["geometry"] = cfg;
  rep["threads"] = fft_threads();

  // Bessel rows against the high-precision series
  {
    double worst = 0.0;
    for (double lam : {0.5, 2.404825557695773, 10.0, 47.3, 150.0}) {
      const auto row = bessel_j_row(lam, 64);
      for (int k : {0, 1, 2, 7, 30, 64}) worst = std::max(worst, std::abs(row[k] - bessel_series_reference(lam, k)));
    }
    check("bessel_vs_series", worst, 1e-10);
  }

  // exact discrete identities
  {
    const auto f = random_image(cfg, 3);
    const ExtendedBox box = make_box(2.0, f.spacing, f.n());
    const auto back = restrict_to_image(embed(f, box), box, f.n());
    check("embed_restrict", rel_diff(back.values.flat(), f.values.flat()), 0.0);

    const auto q = grad(random_image(cfg, 4).values);
    const auto gq = grad(f.values);
    const auto dq = div(q);
    double a = 0.0, b = 0.0, s = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      a += gq.x.data()[i] * q.x.data()[i] + gq.y.data()[i] * q.y.data()[i];
      b += f.values.data()[i] * dq.data()[i];
      s += std::abs(gq.x.data()[i] * q.x.data()[i]) + std::abs(f.values.data()[i] * dq.data()[i]);
    }
    check("grad_div_adjoint", std::abs(a + b) / s, 1e-12);

    const auto g = random_sinogram(cfg, 5);
    RowFftReal tf(g.n_time(), g.n_theta());
    auto round = angular_ifft(angular_fft(g.values, tf), tf);
    check("angular_round_trip", rel_diff(round.flat(), g.values.flat()), 1e-13);

    DegradationSpec spec;
    spec.gamma = 0.3;
    std::mt19937_64 rng(9);
    std::normal_distribution<double> nd;
    for (int b2 = 0; b2 <= g.n_time(); ++b2) spec.eta.emplace_back(nd(rng), nd(rng));
    const auto w = random_sinogram(cfg, 6);
    const auto Bg = degrade(g, spec);
    const auto Bw = degrade_adjoint(w, spec);
    double l = 0.0, r = 0.0, sc = 0.0, n1 = 0.0, n2 = 0.0;
    for (std::size_t i = 0; i < g.values.size(); ++i) {
      l += Bg.values.data()[i] * w.values.data()[i];
      r += g.values.data()[i] * Bw.values.data()[i];
      n1 += Bg.values.data()[i] * Bg.values.data()[i];
      n2 += w.values.data()[i] * w.values.data()[i];
    }
    sc = std::sqrt(n1 * n2);
    check("degrade_dot", std::abs(l - r) / sc, 1e-11);
  }

  // operators
  {
    const auto fwd = make_forward_plan(cfg);
    const auto adj = make_adjoint_plan(cfg);
    const auto inv = make_inverse_plan(cfg);
    double worst = 0.0;
    for (int t = 0; t < 3; ++t)
      worst = std::max(worst, dot_discrepancy(random_image(cfg, 100 + 2 * t),
                                              random_sinogram(cfg, 101 + 2 * t), fwd, adj));
    check("adjoint_dot_test", worst, small ? 2e-2 : 1e-2);

    // the coarse grid cannot resolve the 0.05 edges, so use one wide smooth bump
    const auto f = small ? smoothed_disk(DiskSpec{0.1, -0.05, 0.6, 0.35, 1.0}, cfg) : paper_phantom(cfg);
    const auto g_fast = forward(f, fwd);
    const auto g_slow = slow_forward(f, cfg);
    check("forward_vs_slow", rel_diff(g_fast.values.flat(), g_slow.values.flat()), small ? 3e-2 : 1e-2);
    const auto back = inverse(g_slow, inv);
    check("inverse_round_trip", metrics(back, f).rel_l2, small ? 5e-2 : 5e-3);
  }

  // container round trip
  {
    const auto f = random_image(cfg, 8);
    const auto path = std::filesystem::temp_directory_path() / "tat_selftest.tatb";
    save_image(path, f);
    const auto back = load_image(path);
    std::filesystem::remove(path);
    check("tatb_round_trip", rel_diff(back.values.flat(), f.values.flat()), 0.0);
  }

  rep["pass"] = pass;
  return rep;
}

}  // namespace tat
