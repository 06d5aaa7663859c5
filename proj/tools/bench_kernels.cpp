// Times the serial reference kernels against the OpenMP versions and checks
// that both produce bit-identical results (the parallel loops only split
// independent output elements, so the accumulation order never changes).

#include <chrono>
#include <cstdio>
#include <vector>

#include "gkd/kernels.hpp"
#include "gkd/rng.hpp"

using namespace gkd;
using namespace gkd::kernels;
using clk = std::chrono::steady_clock;

namespace {

std::vector<double> random_vec(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

double ms_since(clk::time_point t0) {
  return std::chrono::duration<double, std::milli>(clk::now() - t0).count();
}

void bench_matmul(std::size_t n, int reps, Rng& rng) {
  auto a = random_vec(n * n, rng);
  auto b = random_vec(n * n, rng);
  std::vector<double> c_serial(n * n), c_omp(n * n);

  auto t0 = clk::now();
  for (int r = 0; r < reps; ++r) {
    matmul_serial(a.data(), b.data(), c_serial.data(), n, n, n, false, false,
                  false);
  }
  double serial_ms = ms_since(t0) / reps;

  t0 = clk::now();
  for (int r = 0; r < reps; ++r) {
    matmul_omp(a.data(), b.data(), c_omp.data(), n, n, n, false, false, false);
  }
  double omp_ms = ms_since(t0) / reps;

  bool identical = c_serial == c_omp;
  std::printf("matmul %4zux%-4zu  serial %8.3f ms  omp %8.3f ms  "
              "speedup %5.2fx  bit-identical %s\n",
              n, n, serial_ms, omp_ms, serial_ms / omp_ms,
              identical ? "yes" : "NO");
}

void bench_outer_sum(std::size_t n, int reps, Rng& rng) {
  auto r = random_vec(n, rng);
  auto c = random_vec(n, rng);
  std::vector<double> out_serial(n * n), out_omp(n * n);

  auto t0 = clk::now();
  for (int k = 0; k < reps; ++k) {
    outer_sum_serial(r.data(), c.data(), out_serial.data(), n, n);
  }
  double serial_ms = ms_since(t0) / reps;

  t0 = clk::now();
  for (int k = 0; k < reps; ++k) {
    outer_sum_omp(r.data(), c.data(), out_omp.data(), n, n);
  }
  double omp_ms = ms_since(t0) / reps;

  bool identical = out_serial == out_omp;
  std::printf("outer_sum %4zux%-4zu serial %8.3f ms  omp %8.3f ms  "
              "speedup %5.2fx  bit-identical %s\n",
              n, n, serial_ms, omp_ms, serial_ms / omp_ms,
              identical ? "yes" : "NO");
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled\n");
#else
  std::printf("OpenMP not available; both paths run serially\n");
#endif
  Rng rng(42);
  for (std::size_t n : {64, 128, 256, 512}) bench_matmul(n, n <= 128 ? 20 : 5, rng);
  for (std::size_t n : {256, 1024, 4096}) bench_outer_sum(n, 20, rng);
  return 0;
}
