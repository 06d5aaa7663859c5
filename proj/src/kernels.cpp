#include "gkd/kernels.hpp"

#include <atomic>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gkd::kernels {

namespace {
#ifdef _OPENMP
std::atomic<bool> g_parallel{true};
#else
std::atomic<bool> g_parallel{false};
#endif

inline double cell(const double* a, std::size_t rows, std::size_t cols,
                   std::size_t i, std::size_t j, bool trans) {
  return trans ? a[j * rows + i] : a[i * cols + j];
}
}  // namespace

bool parallel_enabled() { return g_parallel.load(std::memory_order_relaxed); }

void set_parallel(bool on) {
#ifndef _OPENMP
  (void)on;
  g_parallel.store(false, std::memory_order_relaxed);
#else
  g_parallel.store(on, std::memory_order_relaxed);
#endif
}

void matmul_serial(const double* a, const double* b, double* c,
                   std::size_t n, std::size_t k, std::size_t m,
                   bool trans_a, bool trans_b, bool accumulate) {
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) {
        acc += cell(a, n, k, i, p, trans_a) * cell(b, k, m, p, j, trans_b);
      }
      if (accumulate) {
        c[i * m + j] += acc;
      } else {
        c[i * m + j] = acc;
      }
    }
  }
}

void matmul_omp(const double* a, const double* b, double* c,
                std::size_t n, std::size_t k, std::size_t m,
                bool trans_a, bool trans_b, bool accumulate) {
#ifdef _OPENMP
  const long long nn = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < nn; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) {
        acc += cell(a, n, k, static_cast<std::size_t>(i), p, trans_a) *
               cell(b, k, m, p, j, trans_b);
      }
      if (accumulate) {
        c[i * m + j] += acc;
      } else {
        c[i * m + j] = acc;
      }
    }
  }
#else
  matmul_serial(a, b, c, n, k, m, trans_a, trans_b, accumulate);
#endif
}

void matmul(const double* a, const double* b, double* c,
            std::size_t n, std::size_t k, std::size_t m,
            bool trans_a, bool trans_b, bool accumulate) {
  // OpenMP thread spawn overhead dominates on tiny graphs.
  if (parallel_enabled() && n * m >= 1024) {
    matmul_omp(a, b, c, n, k, m, trans_a, trans_b, accumulate);
  } else {
    matmul_serial(a, b, c, n, k, m, trans_a, trans_b, accumulate);
  }
}

void outer_sum_serial(const double* rows, const double* cols, double* out,
                      std::size_t n, std::size_t m) {
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      out[i * m + j] = rows[i] + cols[j];
    }
  }
}

void outer_sum_omp(const double* rows, const double* cols, double* out,
                   std::size_t n, std::size_t m) {
#ifdef _OPENMP
  const long long nn = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < nn; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      out[i * m + j] = rows[i] + cols[j];
    }
  }
#else
  outer_sum_serial(rows, cols, out, n, m);
#endif
}

void outer_sum(const double* rows, const double* cols, double* out,
               std::size_t n, std::size_t m) {
  if (parallel_enabled() && n * m >= 4096) {
    outer_sum_omp(rows, cols, out, n, m);
  } else {
    outer_sum_serial(rows, cols, out, n, m);
  }
}

}  // namespace gkd::kernels
