#include <cmath>

#include "hwr/simd.hpp"

namespace hwr::simd {

namespace {

inline double hermite_even(double w, int r) {
    // He_r(u) in terms of w = u^2
    switch (r) {
        case 0: return 1.0;
        case 2: return w - 1.0;
        case 4: return (w - 6.0) * w + 3.0;
        default: return ((w - 15.0) * w + 45.0) * w - 15.0;
    }
}

double pair_sum(const double* y, std::size_t n, double inv_g, int r) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double u = (y[i] - y[j]) * inv_g;
            const double w = u * u;
            acc += hermite_even(w, r) * std::exp(-0.5 * w);
        }
        off += acc;
    }
    return static_cast<double>(n) * hermite_even(0.0, r) + 2.0 * off;
}

double gauss_sum(const double* s, std::size_t n, double y, double inv_sigma) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = (y - s[i]) * inv_sigma;
        acc += std::exp(-0.5 * u * u);
    }
    return acc;
}

void csr_apply(const std::size_t* row_ptr, const std::int32_t* col, const double* val, const double* x,
               double* out, std::size_t rows) {
    for (std::size_t r = 0; r < rows; ++r) {
        double acc = 0.0;
        for (std::size_t p = row_ptr[r]; p < row_ptr[r + 1]; ++p) acc += val[p] * x[col[p]];
        out[r] = acc;
    }
}

double dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

}  // namespace

const Kernels& scalar_kernels() {
    static const Kernels k{Isa::Scalar, &pair_sum, &gauss_sum, &csr_apply, &dot};
    return k;
}

}  // namespace hwr::simd
