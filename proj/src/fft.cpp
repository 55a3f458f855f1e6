#include "tat/fft.hpp"

#include <mutex>
#include <stdexcept>

#include "tat/array2d.hpp"

namespace tat {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

int g_threads = 1;
bool g_threads_ready = false;

void configure_planner() {
  if (!g_threads_ready) {
    fftw_init_threads();
    g_threads_ready = true;
  }
  fftw_plan_with_nthreads(g_threads);
}

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

void require(bool ok, const char* what) {
  if (!ok) throw std::runtime_error(what);
}

}  // namespace

void set_fft_threads(int n) {
  std::lock_guard<std::mutex> lock(planner_mutex());
  g_threads = n < 1 ? 1 : n;
}

int fft_threads() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  return g_threads;
}

FftPlan& FftPlan::operator=(FftPlan&& o) noexcept {
  if (this != &o) {
    if (p_) {
      std::lock_guard<std::mutex> lock(planner_mutex());
      fftw_destroy_plan(p_);
    }
    p_ = o.p_;
    o.p_ = nullptr;
  }
  return *this;
}

FftPlan::~FftPlan() {
  if (p_) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(p_);
  }
}

// FFTW_ESTIMATE keeps plans (and therefore results) independent of timing.
Fft2D::Fft2D(int n) : n_(n) {
  require(n >= 2, "Fft2D: size must be >= 2");
  AlignedVector<double> r(static_cast<std::size_t>(n) * n);
  AlignedVector<cplx> c(static_cast<std::size_t>(n) * half());
  std::lock_guard<std::mutex> lock(planner_mutex());
  configure_planner();
  fwd_ = FftPlan(fftw_plan_dft_r2c_2d(n, n, r.data(), as_fftw(c.data()), FFTW_ESTIMATE));
  inv_ = FftPlan(fftw_plan_dft_c2r_2d(n, n, as_fftw(c.data()), r.data(), FFTW_ESTIMATE));
  require(fwd_ && inv_, "Fft2D: planning failed");
}

void Fft2D::forward(const double* in, cplx* out) const {
  fftw_execute_dft_r2c(fwd_.get(), const_cast<double*>(in), as_fftw(out));
}

void Fft2D::inverse(cplx* in, double* out) const {
  fftw_execute_dft_c2r(inv_.get(), as_fftw(in), out);
}

RowFftReal::RowFftReal(int rows, int n) : rows_(rows), n_(n) {
  require(rows >= 1 && n >= 2, "RowFftReal: bad shape");
  AlignedVector<double> r(static_cast<std::size_t>(rows) * n);
  AlignedVector<cplx> c(static_cast<std::size_t>(rows) * half());
  const int len[1] = {n};
  std::lock_guard<std::mutex> lock(planner_mutex());
  configure_planner();
  fwd_ = FftPlan(fftw_plan_many_dft_r2c(1, len, rows, r.data(), nullptr, 1, n,
                                        as_fftw(c.data()), nullptr, 1, half(), FFTW_ESTIMATE));
  inv_ = FftPlan(fftw_plan_many_dft_c2r(1, len, rows, as_fftw(c.data()), nullptr, 1, half(),
                                        r.data(), nullptr, 1, n, FFTW_ESTIMATE));
  require(fwd_ && inv_, "RowFftReal: planning failed");
}

void RowFftReal::forward(const double* in, cplx* out) const {
  fftw_execute_dft_r2c(fwd_.get(), const_cast<double*>(in), as_fftw(out));
}

void RowFftReal::inverse(cplx* in, double* out) const {
  fftw_execute_dft_c2r(inv_.get(), as_fftw(in), out);
}

RowFftComplex::RowFftComplex(int rows, int n, int sign) {
  require(rows >= 1 && n >= 1, "RowFftComplex: bad shape");
  AlignedVector<cplx> a(static_cast<std::size_t>(rows) * n);
  AlignedVector<cplx> b(a.size());
  const int len[1] = {n};
  std::lock_guard<std::mutex> lock(planner_mutex());
  configure_planner();
  plan_ = FftPlan(fftw_plan_many_dft(1, len, rows, as_fftw(a.data()), nullptr, 1, n,
                                     as_fftw(b.data()), nullptr, 1, n, sign, FFTW_ESTIMATE));
  require(static_cast<bool>(plan_), "RowFftComplex: planning failed");
}

void RowFftComplex::execute(cplx* in, cplx* out) const {
  fftw_execute_dft(plan_.get(), as_fftw(in), as_fftw(out));
}

RowR2RComplex::RowR2RComplex(int rows, int n, fftw_r2r_kind kind, int dist) : n_(n) {
  if (dist == 0) dist = n;
  require(rows >= 1 && n >= 1 && dist >= n, "RowR2RComplex: bad shape");
  AlignedVector<cplx> a(static_cast<std::size_t>(rows) * dist);
  AlignedVector<cplx> b(a.size());
  // one transform dimension (stride 2 doubles) and two loop dimensions:
  // rows, then the real/imaginary component
  fftw_iodim dim{n, 2, 2};
  fftw_iodim loops[2] = {{rows, 2 * dist, 2 * dist}, {2, 1, 1}};
  fftw_r2r_kind kinds[1] = {kind};
  std::lock_guard<std::mutex> lock(planner_mutex());
  configure_planner();
  plan_ = FftPlan(fftw_plan_guru_r2r(1, &dim, 2, loops, reinterpret_cast<double*>(a.data()),
                                     reinterpret_cast<double*>(b.data()), kinds,
                                     FFTW_ESTIMATE | FFTW_UNALIGNED));
  require(static_cast<bool>(plan_), "RowR2RComplex: planning failed");
}

void RowR2RComplex::execute(const cplx* in, cplx* out) const {
  fftw_execute_r2r(plan_.get(), const_cast<double*>(reinterpret_cast<const double*>(in)),
                   reinterpret_cast<double*>(out));
}

}  // namespace tat
