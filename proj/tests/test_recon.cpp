#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "common.hpp"
#include "tat/operators.hpp"
#include "tat/oracle.hpp"
#include "tat/phantom.hpp"
#include "tat/recon.hpp"

using namespace tat;

namespace {

Array2D<double> random_array(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Array2D<double> a(n, n);
  for (auto& v : a.flat()) v = nd(rng);
  return a;
}

struct Setup {
  GeometryConfig cfg = test::small_config();
  ForwardPlan fwd = make_forward_plan(cfg);
  AdjointPlan adj = make_adjoint_plan(cfg);
  ImageGrid truth = smoothed_disk(DiskSpec{0.1, -0.05, 0.6, 0.35, 1.0}, cfg);
  Sinogram data = forward(truth, fwd);
};

const Setup& setup() {
  static const Setup s;
  return s;
}

}  // namespace

TEST_CASE("grad and div") {
  auto f = random_array(23, 1);
  auto q = grad(random_array(23, 2));
  q.y = random_array(23, 3);
  auto gf = grad(f);
  auto dq = div(q);
  double a = 0, b = 0, s = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    a += gf.x.data()[i] * q.x.data()[i] + gf.y.data()[i] * q.y.data()[i];
    b += f.data()[i] * dq.data()[i];
    s += std::abs(f.data()[i] * dq.data()[i]);
  }
  CHECK(std::abs(a + b) < 1e-12 * s);

  Array2D<double> c(8, 8, 3.0);
  auto gc = grad(c);
  for (std::size_t i = 0; i < c.size(); ++i) CHECK((gc.x.data()[i] == 0.0 && gc.y.data()[i] == 0.0));

  Array2D<double> lin(8, 8);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) lin(i, j) = 0.5 * j;
  auto gl = grad(lin);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      CHECK(gl.x(i, j) == (j < 7 ? 0.5 : 0.0));
      CHECK(gl.y(i, j) == 0.0);
    }
}

TEST_CASE("tv prox trivial cases") {
  auto f = random_array(12, 4);
  auto same = tv_prox(f, 0.0, 20);
  CHECK(std::equal(same.flat().begin(), same.flat().end(), f.flat().begin()));
  Array2D<double> c(12, 12, 1.7);
  auto pc = tv_prox(c, 0.8, 50);
  for (double v : pc.flat()) CHECK(v == doctest::Approx(1.7).epsilon(1e-14));
  CHECK_THROWS(tv_prox(f, -1.0, 5));
}

TEST_CASE("tv prox of a step meets the optimality conditions") {
  // two 16x8 plateaus at 0 and 1; interface length 16, region area 128
  const int n = 16;
  Array2D<double> f(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) f(i, j) = j < 8 ? 0.0 : 1.0;
  for (double tau : {0.4, 1.6, 3.2}) {
    const double shift = tau * 16.0 / 128.0;
    Array2D<double> exact(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) exact(i, j) = j < 8 ? shift : 1.0 - shift;

    // certificate: p = ∇u/|∇u| on the jump, |p| <= 1 elsewhere, (f - u)/τ = -div p
    VectorField p{Array2D<double>(n, n), Array2D<double>(n, n)};
    for (int i = 0; i < n; ++i)
      for (int j = 0; j + 1 < n; ++j) p.x(i, j) = j <= 7 ? (j + 1) / 8.0 : (15 - j) / 8.0;
    const auto dp = div(p);
    const auto gu = grad(exact);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        CHECK(std::hypot(p.x(i, j), p.y(i, j)) <= 1.0);
        CHECK((f(i, j) - exact(i, j)) / tau == doctest::Approx(-dp(i, j)).epsilon(1e-12));
        const double mag = std::hypot(gu.x(i, j), gu.y(i, j));
        if (mag > 0) CHECK(p.x(i, j) * gu.x(i, j) + p.y(i, j) * gu.y(i, j) == doctest::Approx(mag));
      }

    auto u = tv_prox(f, tau, 20000);
    double worst = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) worst = std::max(worst, std::abs(u.data()[k] - exact.data()[k]));
    CAPTURE(tau);
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("tv prox is nonexpansive") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    auto a = random_array(20, 10 + s), b = random_array(20, 20 + s);
    auto pa = tv_prox(a, 0.7, 3000), pb = tv_prox(b, 0.7, 3000);
    double dp = 0, d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      dp += std::pow(pa.data()[i] - pb.data()[i], 2);
      d += std::pow(a.data()[i] - b.data()[i], 2);
    }
    CHECK(std::sqrt(dp) <= std::sqrt(d) * (1 + 1e-9));
  }
}

TEST_CASE("nnls invariants") {
  const auto& s = setup();
  ReconConfig rc;
  rc.max_iters = 40;
  rc.stop_rel = 1e-4;
  auto res = nnls(s.data, rc, s.fwd, s.adj, &s.truth);
  const auto mask = roi_mask("support", s.cfg);
  for (std::size_t i = 0; i < res.f.values.size(); ++i) {
    CHECK(res.f.values.data()[i] >= 0.0);
    if (!mask.data()[i]) CHECK(res.f.values.data()[i] == 0.0);
  }
  const auto& rec = res.trace.records;
  REQUIRE(rec.size() >= 2);
  for (std::size_t k = 1; k < rec.size(); ++k) CHECK(rec[k].objective <= rec[k - 1].objective * (1 + 1e-8));
  CHECK(res.trace.iterations <= rc.max_iters);
  CHECK(res.trace.rel_l2 >= 0.0);

  auto zero = nnls(Sinogram::for_config(s.cfg), rc, s.fwd, s.adj);
  CHECK(zero.trace.iterations == 1);
  for (double v : zero.f.values.flat()) CHECK(v == 0.0);
}

TEST_CASE("nnls fixed point") {
  const auto& s = setup();
  // data made by the same discrete operator so only the adjoint mismatch remains
  ReconConfig rc;
  rc.max_iters = 1;
  rc.operator_norm = operator_norm(s.fwd, s.adj, 20, 1);
  const double step = 0.9 / (rc.operator_norm * rc.operator_norm);
  Sinogram r = forward(s.truth, s.fwd);
  for (std::size_t i = 0; i < r.values.size(); ++i) r.values.data()[i] -= s.data.values.data()[i];
  auto gr = adjoint(r, s.adj);
  CHECK(test::norm2(gr.values.flat()) * step <= 1e-6 * test::norm2(s.truth.values.flat()));
}

TEST_CASE("upper half roi") {
  const auto& s = setup();
  ReconConfig rc;
  rc.roi = "upper_half";
  rc.max_iters = 5;
  auto res = nnls(s.data, rc, s.fwd, s.adj);
  const auto m = roi_mask("upper_half", s.cfg);
  for (std::size_t i = 0; i < m.size(); ++i)
    if (!m.data()[i]) CHECK(res.f.values.data()[i] == 0.0);
  CHECK_THROWS(roi_mask("left_half", s.cfg));
}

TEST_CASE("pdhg") {
  const auto& s = setup();
  ReconConfig rc;
  rc.method = ReconMethod::tv;
  rc.alpha = 1e-3;
  auto zero = tv_pdhg(Sinogram::for_config(s.cfg), rc, s.fwd, s.adj);
  for (double v : zero.f.values.flat()) CHECK(v == 0.0);

  ReconConfig bad = rc;
  bad.operator_norm = 1.0;
  bad.step_primal = 1.0;
  bad.step_dual = 1.0;
  CHECK_THROWS(tv_pdhg(s.data, bad, s.fwd, s.adj));

  // vanishing α degenerates to plain least squares
  ReconConfig tiny = rc;
  tiny.alpha = 1e-12;
  tiny.stop_rel = 1e-3;
  auto tv = tv_pdhg(s.data, tiny, s.fwd, s.adj, &s.truth);
  ReconConfig ls;
  ls.stop_rel = 1e-3;
  auto nn = nnls(s.data, ls, s.fwd, s.adj);
  CHECK(test::rel_l2(tv.f.values.flat(), nn.f.values.flat()) < 2e-2);
}

TEST_CASE("recon runs are reproducible") {
  const auto& s = setup();
  ReconConfig rc;
  rc.method = ReconMethod::tv;
  rc.alpha = 1e-3;
  rc.max_iters = 5;
  auto a = tv_pdhg(s.data, rc, s.fwd, s.adj);
  auto b = tv_pdhg(s.data, rc, s.fwd, s.adj);
  CHECK(std::equal(a.f.values.flat().begin(), a.f.values.flat().end(), b.f.values.flat().begin()));
}

TEST_CASE("noise injection") {
  const auto& s = setup();
  auto same = add_noise(s.data, 0.0, 1);
  CHECK(std::equal(same.values.flat().begin(), same.values.flat().end(), s.data.values.flat().begin()));
  auto a = add_noise(s.data, 0.3, 17);
  auto b = add_noise(s.data, 0.3, 17);
  CHECK(std::equal(a.values.flat().begin(), a.values.flat().end(), b.values.flat().begin()));
  Sinogram diff = a;
  for (std::size_t i = 0; i < diff.values.size(); ++i) diff.values.data()[i] -= s.data.values.data()[i];
  CHECK(test::norm2(diff.values.flat()) / test::norm2(s.data.values.flat()) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK_THROWS(add_noise(Sinogram::for_config(s.cfg), 0.3, 1));

  auto cfg = s.cfg;
  cfg.arc = Arc::from_degrees(0, 180);
  auto g = forward(s.truth, make_forward_plan(cfg));
  auto gn = add_noise(g, 0.3, 2);
  for (int m = 0; m < g.n_time(); ++m)
    for (int l = 0; l < g.n_theta(); ++l)
      if (!g.arc_mask[l]) CHECK(gn(m, l) == 0.0);
}

TEST_CASE("metrics") {
  const auto& s = setup();
  auto m0 = metrics(s.truth, s.truth);
  CHECK(m0.rel_l2 == 0.0);
  CHECK(m0.rel_linf == 0.0);
  ImageGrid twice = s.truth;
  for (auto& v : twice.values.flat()) v *= 2;
  auto m1 = metrics(twice, s.truth);
  CHECK(m1.rel_l2 == doctest::Approx(1.0));
  CHECK(m1.rel_linf == doctest::Approx(1.0));
  ImageGrid bumped = s.truth;
  bumped(10, 10) += 0.25;
  auto m2 = metrics(bumped, s.truth);
  double mx = 0;
  for (double v : s.truth.values.flat()) mx = std::max(mx, std::abs(v));
  CHECK(m2.rel_linf == doctest::Approx(0.25 / mx));
  CHECK(m2.rel_l2 == doctest::Approx(0.25 / test::norm2(s.truth.values.flat())));
  CHECK_THROWS(metrics(s.truth, ImageGrid::for_config(s.cfg)));
}

TEST_CASE("recon config files") {
  ReconConfig bad;
  bad.stop_rel = 0.0;
  CHECK_THROWS(bad.validate());
  for (const char* name : {"nnls.json", "nnls_upper_half.json", "tv.json"}) {
    std::ifstream is(std::string(TAT_DATA_DIR) + "/recon/" + name);
    REQUIRE(is);
    auto rc = nlohmann::json::parse(is).get<ReconConfig>();
    CHECK_NOTHROW(rc.validate());
    nlohmann::json j = rc;
    CHECK(j.get<ReconConfig>().alpha == rc.alpha);
  }
  IterationTrace t;
  t.records.push_back({1, 2.0, 0.5, 0.1});
  CHECK(t.to_csv().rfind("iteration,objective,update_norm,seconds\n", 0) == 0);
}
