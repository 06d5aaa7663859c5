#pragma once

#include <cstddef>

// Dense kernels backing the tape ops. Each kernel has a serial reference
// implementation and an OpenMP variant parallelized over output elements,
// so both produce bit-identical results (the per-element accumulation
// order never changes). dispatch() picks the OpenMP path when enabled.

namespace gkd::kernels {

bool parallel_enabled();
void set_parallel(bool on);

// c[n x m] += or = a (op) b with optional transposes.
// a is n x k after transposition, b is k x m after transposition.
// accumulate=false overwrites c, true adds into it.
void matmul_serial(const double* a, const double* b, double* c,
                   std::size_t n, std::size_t k, std::size_t m,
                   bool trans_a, bool trans_b, bool accumulate);
void matmul_omp(const double* a, const double* b, double* c,
                std::size_t n, std::size_t k, std::size_t m,
                bool trans_a, bool trans_b, bool accumulate);
void matmul(const double* a, const double* b, double* c,
            std::size_t n, std::size_t k, std::size_t m,
            bool trans_a, bool trans_b, bool accumulate);

// out[i*m+j] = rows[i] + cols[j]
void outer_sum_serial(const double* rows, const double* cols, double* out,
                      std::size_t n, std::size_t m);
void outer_sum_omp(const double* rows, const double* cols, double* out,
                   std::size_t n, std::size_t m);
void outer_sum(const double* rows, const double* cols, double* out,
               std::size_t n, std::size_t m);

}  // namespace gkd::kernels
