#include "hwr/simd.hpp"

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include <cmath>

#define HWR_AVX2 __attribute__((target("avx2,fma")))

namespace hwr::simd {

namespace {

// 2^k for integer-valued k in [-1022, 1023]
HWR_AVX2 inline __m256d pow2_pd(__m256d k) {
    const __m256d magic = _mm256_set1_pd(4503599627370496.0 + 1023.0);  // 2^52 + bias
    const __m256i bits = _mm256_castpd_si256(_mm256_add_pd(k, magic));
    return _mm256_castsi256_pd(_mm256_slli_epi64(bits, 52));
}

// exp on 4 lanes: n = round(x / ln2), r = x - n ln2, degree-13 Taylor on |r| <= ln2/2,
// then 2^n applied in two halves so n down to -1075 stays representable.
HWR_AVX2 inline __m256d exp_pd(__m256d x) {
    x = _mm256_min_pd(_mm256_max_pd(x, _mm256_set1_pd(-745.0)), _mm256_set1_pd(709.0));
    const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634074)),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.93147180369123816490e-01), x);
    r = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.90821492927058770002e-10), r);

    static const double c[14] = {1.0,
                                 1.0,
                                 1.0 / 2,
                                 1.0 / 6,
                                 1.0 / 24,
                                 1.0 / 120,
                                 1.0 / 720,
                                 1.0 / 5040,
                                 1.0 / 40320,
                                 1.0 / 362880,
                                 1.0 / 3628800,
                                 1.0 / 39916800,
                                 1.0 / 479001600,
                                 1.0 / 6227020800.0};
    __m256d p = _mm256_set1_pd(c[13]);
    for (int k = 12; k >= 0; --k) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(c[k]));

    const __m256d n1 = _mm256_floor_pd(_mm256_mul_pd(n, _mm256_set1_pd(0.5)));
    const __m256d n2 = _mm256_sub_pd(n, n1);
    return _mm256_mul_pd(_mm256_mul_pd(p, pow2_pd(n1)), pow2_pd(n2));
}

HWR_AVX2 inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

inline double hermite_even(double w, int r) {
    switch (r) {
        case 0: return 1.0;
        case 2: return w - 1.0;
        case 4: return (w - 6.0) * w + 3.0;
        default: return ((w - 15.0) * w + 45.0) * w - 15.0;
    }
}

template <int R>
HWR_AVX2 inline __m256d hermite_even_pd(__m256d w) {
    const __m256d one = _mm256_set1_pd(1.0);
    if constexpr (R == 0) {
        return one;
    } else if constexpr (R == 2) {
        return _mm256_sub_pd(w, one);
    } else if constexpr (R == 4) {
        return _mm256_fmadd_pd(_mm256_sub_pd(w, _mm256_set1_pd(6.0)), w, _mm256_set1_pd(3.0));
    } else {
        __m256d h = _mm256_sub_pd(w, _mm256_set1_pd(15.0));
        h = _mm256_fmadd_pd(h, w, _mm256_set1_pd(45.0));
        return _mm256_fmadd_pd(h, w, _mm256_set1_pd(-15.0));
    }
}

template <int R>
HWR_AVX2 double pair_sum_r(const double* y, std::size_t n, double inv_g) {
    const __m256d ig = _mm256_set1_pd(inv_g);
    const __m256d mhalf = _mm256_set1_pd(-0.5);
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const __m256d yi = _mm256_set1_pd(y[i]);
        __m256d acc = _mm256_setzero_pd();
        std::size_t j = i + 1;
        for (; j + 4 <= n; j += 4) {
            const __m256d u = _mm256_mul_pd(_mm256_sub_pd(yi, _mm256_loadu_pd(y + j)), ig);
            const __m256d w = _mm256_mul_pd(u, u);
            acc = _mm256_fmadd_pd(hermite_even_pd<R>(w), exp_pd(_mm256_mul_pd(mhalf, w)), acc);
        }
        double tail = 0.0;
        for (; j < n; ++j) {
            const double u = (y[i] - y[j]) * inv_g;
            const double w = u * u;
            tail += hermite_even(w, R) * std::exp(-0.5 * w);
        }
        off += hsum(acc) + tail;
    }
    return static_cast<double>(n) * hermite_even(0.0, R) + 2.0 * off;
}

double pair_sum(const double* y, std::size_t n, double inv_g, int r) {
    switch (r) {
        case 0: return pair_sum_r<0>(y, n, inv_g);
        case 2: return pair_sum_r<2>(y, n, inv_g);
        case 4: return pair_sum_r<4>(y, n, inv_g);
        default: return pair_sum_r<6>(y, n, inv_g);
    }
}

HWR_AVX2 double gauss_sum(const double* s, std::size_t n, double y, double inv_sigma) {
    const __m256d yv = _mm256_set1_pd(y);
    const __m256d is = _mm256_set1_pd(inv_sigma);
    const __m256d mhalf = _mm256_set1_pd(-0.5);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d u = _mm256_mul_pd(_mm256_sub_pd(yv, _mm256_loadu_pd(s + i)), is);
        acc = _mm256_add_pd(acc, exp_pd(_mm256_mul_pd(mhalf, _mm256_mul_pd(u, u))));
    }
    double tail = 0.0;
    for (; i < n; ++i) {
        const double u = (y - s[i]) * inv_sigma;
        tail += std::exp(-0.5 * u * u);
    }
    return hsum(acc) + tail;
}

HWR_AVX2 void csr_apply(const std::size_t* row_ptr, const std::int32_t* col, const double* val, const double* x,
                        double* out, std::size_t rows) {
    for (std::size_t r = 0; r < rows; ++r) {
        std::size_t p = row_ptr[r];
        const std::size_t end = row_ptr[r + 1];
        __m256d acc = _mm256_setzero_pd();
        for (; p + 4 <= end; p += 4) {
            const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(col + p));
            const __m256d xv = _mm256_i32gather_pd(x, idx, 8);
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(val + p), xv, acc);
        }
        double tail = 0.0;
        for (; p < end; ++p) tail += val[p] * x[col[p]];
        out[r] = hsum(acc) + tail;
    }
}

HWR_AVX2 double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    double tail = 0.0;
    for (; i < n; ++i) tail += a[i] * b[i];
    return hsum(_mm256_add_pd(acc0, acc1)) + tail;
}

}  // namespace

const Kernels* avx2_kernels() {
    static const Kernels k{Isa::Avx2, &pair_sum, &gauss_sum, &csr_apply, &dot};
    return &k;
}

}  // namespace hwr::simd

#else

namespace hwr::simd {
const Kernels* avx2_kernels() { return nullptr; }
}  // namespace hwr::simd

#endif
