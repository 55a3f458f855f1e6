// tat: command-line front end for the thermoacoustic operators.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "tat/bench.hpp"
#include "tat/fft.hpp"
#include "tat/io.hpp"
#include "tat/operators.hpp"
#include "tat/oracle.hpp"
#include "tat/phantom.hpp"
#include "tat/recon.hpp"

namespace {

using tat::GeometryConfig;
using nlohmann::json;

json read_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw tat::IoError("cannot open " + path);
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw tat::IoError(path + ": " + e.what());
  }
}

// Geometry from an optional JSON file, then individual flag overrides.
struct GeometryFlags {
  std::string file;
  int n_image = 0;
  int n_theta = 0;
  int n_time = 0;
  double T = 0.0;
  std::string arc;
  int oversampling = 0;

  void attach(CLI::App* app) {
    app->add_option("--config", file, "geometry JSON");
    app->add_option("--n-image", n_image, "image samples per axis");
    app->add_option("--n-theta", n_theta, "detector count");
    app->add_option("--n-time", n_time, "time samples");
    app->add_option("--horizon", T, "measurement time T");
    app->add_option("--arc", arc, "\"full\" or \"deg0,deg1\"");
    app->add_option("--oversampling", oversampling, "polar angles per detector angle");
  }

  GeometryConfig config() const {
    GeometryConfig c;
    if (!file.empty()) c = read_json(file).get<GeometryConfig>();
    if (n_image) c.n_image = n_image;
    if (n_theta) c.n_theta = n_theta;
    if (n_time) c.n_time = n_time;
    if (T > 0) c.T = T;
    if (!arc.empty()) {
      if (arc == "full") {
        c.arc = tat::Arc::full_circle();
      } else {
        const auto comma = arc.find(',');
        if (comma == std::string::npos) throw tat::GeometryError("--arc expects deg0,deg1");
        c.arc = tat::Arc::from_degrees(std::stod(arc.substr(0, comma)), std::stod(arc.substr(comma + 1)));
      }
    }
    c.validate();
    return c;
  }

  tat::PlanOptions options() const {
    tat::PlanOptions o;
    if (oversampling) o.angular_oversampling = oversampling;
    return o;
  }
};

json geometry_meta(const GeometryConfig& c) { return json{{"geometry", c}}; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fast thermoacoustic forward, adjoint and inverse operators"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "FFT threads")->check(CLI::PositiveNumber);

  std::string in, out, preset = "paper-disks", format, eta_file, trace, truth, recon_file, method;
  std::string sizes = "129,257,513";
  std::uint64_t seed = 1;
  double level = 0.3, gamma = 0.0;
  int count_min = 3, count_max = 8, reps = 3, slow_max = 257;
  bool slow = false, small = false, adjoint_mode = false;

  GeometryFlags geo;

  auto* phantom = app.add_subcommand("phantom", "generate a test image");
  phantom->add_option("--preset", preset, "paper-disks | random-ellipses | upper-half")
      ->check(CLI::IsMember({"paper-disks", "random-ellipses", "upper-half"}));
  phantom->add_option("--seed", seed);
  phantom->add_option("--count-min", count_min);
  phantom->add_option("--count-max", count_max);
  phantom->add_option("--from", in, "phantom descriptor JSON (overrides --preset)");
  phantom->add_option("--out", out)->required();
  geo.attach(phantom);

  auto* fwd = app.add_subcommand("forward", "g = A f");
  fwd->add_option("--in", in)->required();
  fwd->add_option("--out", out)->required();
  fwd->add_flag("--slow", slow, "use the reference propagator");
  geo.attach(fwd);

  auto* adj = app.add_subcommand("adjoint", "u = A* g");
  adj->add_option("--in", in)->required();
  adj->add_option("--out", out)->required();
  geo.attach(adj);

  auto* inv = app.add_subcommand("invert", "approximate inverse");
  inv->add_option("--in", in)->required();
  inv->add_option("--out", out)->required();
  geo.attach(inv);

  auto* noise = app.add_subcommand("noise", "add white noise of a given relative level");
  noise->add_option("--in", in)->required();
  noise->add_option("--out", out)->required();
  noise->add_option("--level", level);
  noise->add_option("--seed", seed);

  auto* degrade = app.add_subcommand("degrade", "attenuate and filter traces");
  degrade->add_option("--in", in)->required();
  degrade->add_option("--out", out)->required();
  degrade->add_option("--gamma", gamma);
  degrade->add_option("--eta-file", eta_file, "JSON with eta samples or a window");
  degrade->add_flag("--adjoint", adjoint_mode);

  auto* recon = app.add_subcommand("recon", "iterative reconstruction");
  recon->add_option("--method", method)->check(CLI::IsMember({"nnls", "tv"}));
  recon->add_option("--in", in)->required();
  recon->add_option("--out", out)->required();
  recon->add_option("--recon", recon_file, "reconstruction JSON");
  recon->add_option("--trace", trace, "iteration trace CSV");
  recon->add_option("--truth", truth, "ground truth image for metrics");
  geo.attach(recon);

  auto* selftest = app.add_subcommand("selftest", "numerical self checks (JSON report)");
  selftest->add_flag("--small", small);

  auto* bench = app.add_subcommand("bench", "operator timings (CSV)");
  bench->add_option("--sizes", sizes);
  bench->add_option("--reps", reps)->check(CLI::PositiveNumber);
  bench->add_option("--slow-max", slow_max, "largest size timed with the reference propagator");

  auto* exp = app.add_subcommand("export", "write an array as PGM or CSV");
  exp->add_option("--in", in)->required();
  exp->add_option("--format", format)->required()->check(CLI::IsMember({"pgm", "csv"}));
  exp->add_option("--out", out)->required();

  auto* met = app.add_subcommand("metrics", "relative errors of an image against ground truth (JSON)");
  met->add_option("--in", in)->required();
  met->add_option("--truth", truth)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    tat::set_fft_threads(threads);

    if (phantom->parsed()) {
      const auto cfg = geo.config();
      tat::ImageGrid f;
      json meta = geometry_meta(cfg);
      if (!in.empty()) {
        const auto desc = read_json(in);
        f = tat::phantom_from_json(desc, cfg);
        meta["phantom"] = desc;
      } else if (preset == "paper-disks") {
        f = tat::paper_phantom(cfg);
        meta["phantom"] = tat::paper_phantom_json();
      } else if (preset == "upper-half") {
        f = tat::upper_half_phantom(cfg);
        meta["phantom"] = tat::paper_phantom_json();
        meta["phantom"]["upper_half"] = true;
      } else {
        f = tat::random_ellipses(seed, count_min, count_max, cfg);
        meta["phantom"] = {{"ellipses", tat::random_ellipse_specs(seed, count_min, count_max, cfg.support_radius)}};
        meta["seed"] = seed;
      }
      tat::save_image(out, f, meta);
    } else if (fwd->parsed()) {
      const auto f = tat::load_image(in);
      auto cfg = geo.config();
      tat::Sinogram g;
      if (slow) {
        g = tat::slow_forward(f, cfg);
      } else {
        cfg.n_image = f.n();
        g = tat::forward(f, tat::make_forward_plan(cfg, geo.options()));
      }
      tat::save_sinogram(out, g, geometry_meta(cfg));
    } else if (adj->parsed() || inv->parsed()) {
      const auto g = tat::load_sinogram(in);
      auto cfg = geo.config();
      cfg.n_theta = g.n_theta();
      cfg.n_time = g.n_time();
      const auto f = adj->parsed() ? tat::adjoint(g, tat::make_adjoint_plan(cfg, geo.options()))
                                   : tat::inverse(g, tat::make_inverse_plan(cfg, geo.options()));
      tat::save_image(out, f, geometry_meta(cfg));
    } else if (noise->parsed()) {
      const auto g = tat::load_sinogram(in);
      auto meta = tat::read_tatb(in).meta;
      meta["noise"] = {{"level", level}, {"seed", seed}};
      tat::save_sinogram(out, tat::add_noise(g, level, seed), meta);
    } else if (degrade->parsed()) {
      const auto g = tat::load_sinogram(in);
      tat::DegradationSpec spec;
      if (!eta_file.empty()) {
        auto j = read_json(eta_file);
        if (!j.contains("n_time")) j["n_time"] = g.n_time();
        spec = j.get<tat::DegradationSpec>();
      }
      if (degrade->count("--gamma")) spec.gamma = gamma;
      auto meta = tat::read_tatb(in).meta;
      meta["degradation"] = {{"gamma", spec.gamma}, {"adjoint", adjoint_mode}};
      tat::save_sinogram(out, adjoint_mode ? tat::degrade_adjoint(g, spec) : tat::degrade(g, spec), meta);
    } else if (recon->parsed()) {
      const auto g = tat::load_sinogram(in);
      auto cfg = geo.config();
      cfg.n_theta = g.n_theta();
      cfg.n_time = g.n_time();
      tat::ReconConfig rc;
      if (!recon_file.empty()) rc = read_json(recon_file).get<tat::ReconConfig>();
      if (!method.empty()) rc.method = method == "tv" ? tat::ReconMethod::tv : tat::ReconMethod::nnls;
      const auto fp = tat::make_forward_plan(cfg, geo.options());
      const auto ap = tat::make_adjoint_plan(cfg, geo.options());
      tat::ImageGrid t;
      if (!truth.empty()) t = tat::load_image(truth);
      const auto res = rc.method == tat::ReconMethod::tv
                           ? tat::tv_pdhg(g, rc, fp, ap, truth.empty() ? nullptr : &t)
                           : tat::nnls(g, rc, fp, ap, truth.empty() ? nullptr : &t);
      json meta = geometry_meta(cfg);
      meta["recon"] = rc;
      meta["trace"] = res.trace;
      tat::save_image(out, res.f, meta);
      if (!trace.empty()) tat::write_text_atomic(trace, res.trace.to_csv());
      std::cout << json(res.trace).dump(2) << '\n';
    } else if (selftest->parsed()) {
      const auto rep = tat::run_selftest(small);
      std::cout << rep.dump(2) << '\n';
      return rep.at("pass").get<bool>() ? 0 : 1;
    } else if (bench->parsed()) {
      std::vector<int> ns;
      std::stringstream ss(sizes);
      for (std::string tok; std::getline(ss, tok, ',');) ns.push_back(std::stoi(tok));
      std::cout << tat::bench_csv(tat::run_bench(ns, reps, slow_max));
    } else if (met->parsed()) {
      const auto m = tat::metrics(tat::load_image(in), tat::load_image(truth));
      std::cout << json{{"rel_l2", m.rel_l2}, {"rel_linf", m.rel_linf}}.dump(2) << '\n';
    } else if (exp->parsed()) {
      const auto a = tat::read_tatb(in);
      if (a.shape.size() != 2) throw tat::IoError("export expects a 2-D array");
      tat::Array2D<double> arr(a.shape[0], a.shape[1]);
      std::copy(a.data.begin(), a.data.end(), arr.data());
      if (format == "pgm")
        tat::export_pgm(out, arr);
      else
        tat::export_csv(out, arr);
    }
  } catch (const std::exception& e) {
    std::cerr << "tat: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
