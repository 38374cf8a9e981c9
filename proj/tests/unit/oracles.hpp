#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace oracle {

// composite 20-point Gauss-Legendre on `cells` equal pieces of [a, b]
inline double integrate(const std::function<double(double)>& f, double a, double b, int cells = 64) {
    double s = 0.0;
    const double h = (b - a) / cells;
    for (int c = 0; c < cells; ++c) {
        const double lo = a + c * h;
        s += boost::math::quadrature::gauss<double, 20>::integrate(f, lo, lo + h);
    }
    return s;
}

// integral over the breakpoints given (exact for piecewise polynomials of degree < 40 between them)
inline double integrate_pieces(const std::function<double(double)>& f, const std::vector<double>& breaks) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
        s += boost::math::quadrature::gauss<double, 20>::integrate(f, breaks[i], breaks[i + 1]);
    return s;
}

// endpoint singularities allowed
inline double integrate_ts(const std::function<double(double)>& f, double a, double b) {
    boost::math::quadrature::tanh_sinh<double> q;
    return q.integrate(f, a, b);
}

inline std::vector<double> grid(double a, double b, int cells) {
    std::vector<double> g(static_cast<std::size_t>(cells) + 1);
    for (int i = 0; i <= cells; ++i) g[static_cast<std::size_t>(i)] = a + (b - a) * i / cells;
    return g;
}

}  // namespace oracle
