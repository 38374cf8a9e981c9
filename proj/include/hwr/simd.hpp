#pragma once

#include <cstddef>
#include <cstdint>

namespace hwr::simd {

enum class Isa { Scalar, Avx2 };

const char* to_string(Isa isa);

// Hot loops with a scalar reference and optional vector variants.
struct Kernels {
    Isa isa;
    // sum over all ordered pairs (i, j), diagonal included, of He_r(u) exp(-u^2/2),
    // u = (y_i - y_j) * inv_g, r in {0, 2, 4, 6}
    double (*gauss_pair_sum)(const double* y, std::size_t n, double inv_g, int r);
    // sum_i exp(-u_i^2/2), u_i = (y - s_i) * inv_sigma
    double (*gauss_sum)(const double* s, std::size_t n, double y, double inv_sigma);
    // out[r] = sum_{p in row r} val[p] * x[col[p]]
    void (*csr_apply)(const std::size_t* row_ptr, const std::int32_t* col, const double* val, const double* x,
                      double* out, std::size_t rows);
    double (*dot)(const double* a, const double* b, std::size_t n);
};

const Kernels& scalar_kernels();
// nullptr when the build target has no AVX2 variant
const Kernels* avx2_kernels();

bool avx2_supported();

// Active table: AVX2 when the CPU supports it, unless HWR_SIMD=scalar is set.
const Kernels& kernels();
Isa active_isa();
// Override for tests and benchmarks; throws when the ISA is unavailable.
void set_isa(Isa isa);

}  // namespace hwr::simd
