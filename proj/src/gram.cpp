#include <cmath>
#include <map>
#include <mutex>

#include <Eigen/Eigenvalues>

#include "hwr/errors.hpp"
#include "hwr/regression.hpp"
#include "hwr/spline.hpp"

namespace hwr {

namespace {

// Golub-Welsch nodes and weights on [-1, 1]
void gauss_legendre(int q, std::vector<double>& x, std::vector<double>& w) {
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(q), sub(q - 1);
    for (int k = 1; k < q; ++k) sub(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    x.resize(static_cast<std::size_t>(q));
    w.resize(static_cast<std::size_t>(q));
    for (int i = 0; i < q; ++i) {
        x[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
        const double v = es.eigenvectors()(0, i);
        w[static_cast<std::size_t>(i)] = 2.0 * v * v;
    }
}

const std::vector<double>& autocorrelation(int m) {
    static std::map<int, std::vector<double>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(m);
    if (it == cache.end()) {
        std::vector<double> c;
        for (const auto& r : wavelet_autocorrelation(m)) c.push_back(to_double(r));
        it = cache.emplace(m, std::move(c)).first;
    }
    return it->second;
}

}  // namespace

GramResult gram_restricted(int m, int n, double a, double b) {
    if (n < 0) fail(ErrorKind::InvalidArgument, "gram: n must be >= 0");
    if (!(a >= -0.5 && b <= 0.5 && a < b)) fail(ErrorKind::InvalidArgument, "gram: need -1/2 <= a < b <= 1/2");
    IndexSet idx = build_index_set(1, n, {{}, {0}});
    const auto N = static_cast<Eigen::Index>(idx.size());
    GramResult res;
    res.G = Eigen::MatrixXd::Zero(N, N);

    // every basis function is a polynomial on each cell of this grid; m+1 nodes integrate products exactly
    const double h = std::ldexp(1.0, -(n + 1));
    std::vector<double> brk{a};
    for (long long i = 0; -0.5 + static_cast<double>(i) * h < b; ++i) {
        const double g = -0.5 + static_cast<double>(i) * h;
        if (g > a) brk.push_back(g);
    }
    brk.push_back(b);
    std::vector<double> gx, gw;
    gauss_legendre(m + 1, gx, gw);

    std::vector<std::pair<std::size_t, double>> vals;
    for (std::size_t c = 0; c + 1 < brk.size(); ++c) {
        const double lo = brk[c], hi = brk[c + 1];
        if (!(hi > lo)) continue;
        for (std::size_t q = 0; q < gx.size(); ++q) {
            const double x = 0.5 * (hi - lo) * gx[q] + 0.5 * (hi + lo);
            const double wq = 0.5 * (hi - lo) * gw[q];
            vals.clear();
            for_each_basis_value(
                idx, m, [&](std::size_t) { return &x; }, [&](std::size_t col, double v) { vals.emplace_back(col, v); });
            for (const auto& [ci, vi] : vals)
                for (const auto& [cj, vj] : vals)
                    res.G(static_cast<Eigen::Index>(ci), static_cast<Eigen::Index>(cj)) += wq * vi * vj;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(res.G, Eigen::EigenvaluesOnly);
    res.mu_min = es.eigenvalues()(0);
    res.mu_max = es.eigenvalues()(N - 1);
    return res;
}

std::vector<double> level_gram_row(int m, int j) {
    if (j < 0) return {1.0};
    const auto& c = autocorrelation(m);
    const long long P = 1ll << j;
    std::vector<double> row(static_cast<std::size_t>(P), 0.0);
    const long long L = 2 * m - 2;
    for (long long l = -L; l <= L; ++l) {
        long long k = l % P;
        if (k < 0) k += P;
        row[static_cast<std::size_t>(k)] += c[static_cast<std::size_t>(std::llabs(l))];
    }
    return row;
}

Eigen::MatrixXd level_gram(int m, int j) {
    auto row = level_gram_row(m, j);
    const auto P = static_cast<Eigen::Index>(row.size());
    Eigen::MatrixXd G(P, P);
    for (Eigen::Index r = 0; r < P; ++r)
        for (Eigen::Index s = 0; s < P; ++s) G(r, s) = row[static_cast<std::size_t>(((s - r) % P + P) % P)];
    return G;
}

}  // namespace hwr
