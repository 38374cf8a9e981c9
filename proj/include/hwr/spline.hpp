#pragma once

#include <vector>

#include "hwr/piecewise.hpp"

namespace hwr {

// Centered cardinal B-spline of order m, support [-m/2, m/2].
PiecewisePolynomial bspline(int m);

// q_0 .. q_{3m-2}
std::vector<Rational> chui_wang_coefficients(int m);

// psi(x) = sum_n q_n B_m(2x - n - m/2), support [0, 2m-1]
PiecewisePolynomial chui_wang_wavelet(int m);

// m-fold antiderivative of psi
PiecewisePolynomial psi_m(int m);

// c_l = integral of psi(x) psi(x - l) over R for l = 0 .. 2m-2
std::vector<Rational> wavelet_autocorrelation(int m);

// Fast double evaluation of psi on the half-integer grid. Half-open support
// [0, 2m-1) so periodized sums never double count a shared endpoint.
class WaveletTable {
public:
    explicit WaveletTable(int m);
    int order() const { return m_; }
    double support_hi() const { return static_cast<double>(2 * m_ - 1); }
    double operator()(double t) const {
        if (!(t >= 0.0) || t >= hi_) return 0.0;
        const double s = 2.0 * t;
        auto i = static_cast<std::size_t>(s);
        const double* c = &coef_[i * stride_];
        const double u = t - 0.5 * static_cast<double>(i);
        double acc = c[stride_ - 1];
        for (std::size_t l = stride_ - 1; l-- > 0;) acc = acc * u + c[l];
        return acc;
    }

private:
    int m_;
    double hi_;
    std::size_t stride_;
    std::vector<double> coef_;
};

const WaveletTable& wavelet_table(int m);

}  // namespace hwr
