#include "hwr/spline.hpp"

#include <map>
#include <memory>
#include <mutex>

#include "hwr/errors.hpp"

namespace hwr {

namespace {

void check_order(int m) {
    if (m < 1) fail(ErrorKind::InvalidArgument, "invalid order m=" + std::to_string(m) + " (need m >= 1)");
}

template <class T>
const T& memo(std::map<int, std::unique_ptr<T>>& cache, std::mutex& mu, int m, T (*make)(int)) {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(m);
    if (it == cache.end()) it = cache.emplace(m, std::make_unique<T>(make(m))).first;
    return *it->second;
}

BigInt binomial(int n, int k) {
    BigInt r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

PiecewisePolynomial make_bspline(int m) {
    if (m == 1) return PiecewisePolynomial({Rational(-1, 2), Rational(1, 2)}, {{Rational(1)}});
    return bspline(m - 1).box_smooth();
}

PiecewisePolynomial make_wavelet(int m) {
    auto q = chui_wang_coefficients(m);
    const auto& B = bspline(m);
    PiecewisePolynomial psi;
    for (std::size_t n = 0; n < q.size(); ++n) {
        if (q[n] == 0) continue;
        Rational shift = Rational(static_cast<long long>(n)) + Rational(m, 2);
        psi = psi + B.affine(2, shift).scaled(q[n]);
    }
    return psi.trimmed();
}

PiecewisePolynomial make_psi_m(int m) {
    auto f = chui_wang_wavelet(m);
    for (int i = 0; i < m; ++i) f = f.antiderivative();
    if (f.right_tail() != 0) fail(ErrorKind::Numeric, "psi_m: nonzero tail, vanishing moments violated");
    return f.trimmed();
}

}  // namespace

PiecewisePolynomial bspline(int m) {
    check_order(m);
    static std::map<int, std::unique_ptr<PiecewisePolynomial>> cache;
    static std::recursive_mutex mu;
    std::lock_guard<std::recursive_mutex> lock(mu);
    auto it = cache.find(m);
    if (it == cache.end()) it = cache.emplace(m, std::make_unique<PiecewisePolynomial>(make_bspline(m))).first;
    return *it->second;
}

std::vector<Rational> chui_wang_coefficients(int m) {
    check_order(m);
    const auto& B2m = bspline(2 * m);
    std::vector<Rational> q;
    const Rational scale = Rational(1) / Rational(BigInt(1) << (m - 1));
    for (int n = 0; n <= 3 * m - 2; ++n) {
        Rational s = 0;
        for (int k = 0; k <= m; ++k) {
            s += Rational(binomial(m, k)) * B2m.eval_exact(Rational(n + 1 - k - m));
        }
        q.push_back((n % 2 == 0 ? scale : -scale) * s);
    }
    return q;
}

PiecewisePolynomial chui_wang_wavelet(int m) {
    check_order(m);
    static std::map<int, std::unique_ptr<PiecewisePolynomial>> cache;
    static std::mutex mu;
    return memo(cache, mu, m, &make_wavelet);
}

PiecewisePolynomial psi_m(int m) {
    check_order(m);
    static std::map<int, std::unique_ptr<PiecewisePolynomial>> cache;
    static std::mutex mu;
    return memo(cache, mu, m, &make_psi_m);
}

std::vector<Rational> wavelet_autocorrelation(int m) {
    const auto psi = chui_wang_wavelet(m);
    std::vector<Rational> c;
    for (int l = 0; l <= 2 * m - 2; ++l) c.push_back((psi * psi.affine(1, Rational(l))).integral());
    return c;
}

WaveletTable::WaveletTable(int m) : m_(m), hi_(2.0 * m - 1.0), stride_(static_cast<std::size_t>(m)) {
    check_order(m);
    auto psi = chui_wang_wavelet(m);
    std::vector<Rational> grid;
    for (int l = 0; l <= 2 * (2 * m - 1); ++l) grid.push_back(Rational(l, 2));
    auto r = psi.refined(grid);
    coef_.assign(r.pieces().size() * stride_, 0.0);
    for (std::size_t i = 0; i < r.pieces().size(); ++i) {
        const auto& p = r.pieces()[i];
        for (std::size_t l = 0; l < p.size() && l < stride_; ++l) coef_[i * stride_ + l] = to_double(p[l]);
    }
}

const WaveletTable& wavelet_table(int m) {
    static std::map<int, std::unique_ptr<WaveletTable>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(m);
    if (it == cache.end()) it = cache.emplace(m, std::make_unique<WaveletTable>(m)).first;
    return *it->second;
}

}  // namespace hwr
