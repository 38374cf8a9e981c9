#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "hwr/errors.hpp"
#include "hwr/regression.hpp"
#include "hwr/simd.hpp"

namespace hwr {

namespace {

double norm2(const std::vector<double>& v) { return std::sqrt(simd::kernels().dot(v.data(), v.data(), v.size())); }

void scale(std::vector<double>& v, double s) {
    for (auto& x : v) x *= s;
}

}  // namespace

std::string LsqrResult::stop_reason() const {
    switch (istop) {
        case 0: return "x = 0 is the exact solution";
        case 1: return "residual below tolerance (consistent system)";
        case 2: return "normal-equation residual below tolerance (least squares)";
        case 3: return "condition estimate exceeded conlim";
        case 4: return "residual at machine precision";
        case 5: return "normal-equation residual at machine precision";
        case 7: return "iteration limit reached";
        default: return "unknown";
    }
}

// Paige & Saunders LSQR without damping.
LsqrResult lsqr(const LinearOperator& A, const std::vector<double>& b, const LsqrOptions& opt) {
    const std::size_t M = A.rows(), N = A.cols();
    if (b.size() != M) fail(ErrorKind::InvalidArgument, "lsqr: right-hand side has wrong length");
    for (double v : b)
        if (!std::isfinite(v)) fail(ErrorKind::Data, "lsqr: non-finite value in right-hand side");
    const std::size_t max_iter = opt.max_iter ? opt.max_iter : 50 * std::max<std::size_t>(N, 1);
    const double eps = std::numeric_limits<double>::epsilon();
    const double ctol = opt.conlim > 0 ? 1.0 / opt.conlim : 0.0;

    LsqrResult res;
    res.x.assign(N, 0.0);
    std::vector<double> u(b), v(N), w(N), tmp_m(M), tmp_n(N);
    double beta = norm2(u);
    if (beta > 0) scale(u, 1.0 / beta);
    A.apply_transpose(u.data(), v.data());
    double alpha = beta > 0 ? norm2(v) : 0.0;
    if (alpha > 0) scale(v, 1.0 / alpha);
    w = v;

    const double bnorm = beta;
    double rhobar = alpha, phibar = beta;
    double anorm = 0.0, acond = 0.0, ddnorm = 0.0, xxnorm = 0.0, z = 0.0, cs2 = -1.0, sn2 = 0.0;
    double rnorm = beta, arnorm = alpha * beta, xnorm = 0.0;
    if (opt.keep_history) res.residual_history.push_back(rnorm);
    if (arnorm == 0.0) {
        res.residual_norm = rnorm;
        res.istop = 0;
        res.converged = true;
        return res;
    }

    std::size_t itn = 0;
    int istop = 0;
    while (itn < max_iter) {
        ++itn;
        A.apply(v.data(), tmp_m.data());
        for (std::size_t i = 0; i < M; ++i) u[i] = tmp_m[i] - alpha * u[i];
        beta = norm2(u);
        if (beta > 0) {
            scale(u, 1.0 / beta);
            anorm = std::sqrt(anorm * anorm + alpha * alpha + beta * beta);
            A.apply_transpose(u.data(), tmp_n.data());
            for (std::size_t i = 0; i < N; ++i) v[i] = tmp_n[i] - beta * v[i];
            alpha = norm2(v);
            if (alpha > 0) scale(v, 1.0 / alpha);
        }

        const double rho = std::hypot(rhobar, beta);
        const double cs = rhobar / rho, sn = beta / rho;
        const double theta = sn * alpha;
        rhobar = -cs * alpha;
        const double phi = cs * phibar;
        phibar = sn * phibar;
        const double tau = sn * phi;

        const double t1 = phi / rho, t2 = -theta / rho;
        double dk2 = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double dk = w[i] / rho;
            dk2 += dk * dk;
            res.x[i] += t1 * w[i];
            w[i] = v[i] + t2 * w[i];
        }
        ddnorm += dk2;

        const double delta = sn2 * rho, gambar = -cs2 * rho;
        const double rhs = phi - delta * z;
        const double zbar = rhs / gambar;
        xnorm = std::sqrt(xxnorm + zbar * zbar);
        const double gamma = std::hypot(gambar, theta);
        cs2 = gambar / gamma;
        sn2 = theta / gamma;
        z = rhs / gamma;
        xxnorm += z * z;

        acond = anorm * std::sqrt(ddnorm);
        rnorm = phibar;
        arnorm = alpha * std::abs(tau);
        if (opt.keep_history) res.residual_history.push_back(rnorm);

        const double test1 = rnorm / bnorm;
        const double test2 = rnorm > 0 ? arnorm / (anorm * rnorm) : 0.0;
        const double test3 = 1.0 / acond;
        const double t1s = test1 / (1.0 + anorm * xnorm / bnorm);
        const double rtol = opt.btol + opt.atol * anorm * xnorm / bnorm;

        if (1.0 + test3 <= 1.0) istop = 6;
        if (1.0 + test2 <= 1.0) istop = 5;
        if (1.0 + t1s <= 1.0) istop = 4;
        if (test3 <= ctol) istop = 3;
        if (test2 <= opt.atol) istop = 2;
        if (test1 <= rtol) istop = 1;
        if (istop) break;
    }
    if (!istop) istop = 7;

    // report the true residuals rather than the recurrences
    A.apply(res.x.data(), tmp_m.data());
    for (std::size_t i = 0; i < M; ++i) tmp_m[i] = b[i] - tmp_m[i];
    A.apply_transpose(tmp_m.data(), tmp_n.data());
    res.residual_norm = norm2(tmp_m);
    res.normal_residual_norm = norm2(tmp_n);
    res.iterations = itn;
    res.anorm = anorm;
    res.acond = acond;
    res.istop = istop;
    res.converged = istop >= 1 && istop <= 5;
    for (double v2 : res.x)
        if (!std::isfinite(v2)) fail(ErrorKind::Numeric, "lsqr produced non-finite coefficients");
    return res;
}

namespace {

// Extreme eigenvalues of the symmetric operator B = A^T A via Lanczos with full reorthogonalization.
std::pair<double, double> lanczos_extremes(const LinearOperator& A) {
    const std::size_t N = A.cols(), M = A.rows();
    std::vector<std::vector<double>> Q;
    std::vector<double> alpha, beta;
    std::vector<double> q(N), tmp(M), r(N);
    Rng rng(12345);
    for (auto& v : q) v = rng.uniform() - 0.5;
    double nq = norm2(q);
    scale(q, 1.0 / nq);
    double prev_lo = 0, prev_hi = 0;
    int stable = 0;
    for (std::size_t k = 0; k < N; ++k) {
        Q.push_back(q);
        A.apply(q.data(), tmp.data());
        A.apply_transpose(tmp.data(), r.data());
        const double a = simd::kernels().dot(q.data(), r.data(), N);
        alpha.push_back(a);
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& qi : Q) {
                const double c = simd::kernels().dot(qi.data(), r.data(), N);
                for (std::size_t i = 0; i < N; ++i) r[i] -= c * qi[i];
            }
        const double b = norm2(r);
        const auto K = static_cast<Eigen::Index>(alpha.size());
        Eigen::VectorXd diag(K), sub(std::max<Eigen::Index>(K - 1, 0));
        for (Eigen::Index i = 0; i < K; ++i) diag(i) = alpha[static_cast<std::size_t>(i)];
        for (Eigen::Index i = 0; i + 1 < K; ++i) sub(i) = beta[static_cast<std::size_t>(i)];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
        es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
        const double lo = es.eigenvalues()(0), hi = es.eigenvalues()(K - 1);
        // residual bounds |b * last component| of the extreme Ritz vectors
        const double rlo = std::abs(b * es.eigenvectors()(K - 1, 0));
        const double rhi = std::abs(b * es.eigenvectors()(K - 1, K - 1));
        if (b <= 1e-14 * hi || (rlo <= 1e-10 * hi && rhi <= 1e-10 * hi)) return {lo, hi};
        if (k > 10 && std::abs(lo - prev_lo) <= 1e-12 * hi && std::abs(hi - prev_hi) <= 1e-12 * hi) {
            if (++stable > 20) return {lo, hi};
        } else {
            stable = 0;
        }
        prev_lo = lo;
        prev_hi = hi;
        beta.push_back(b);
        for (std::size_t i = 0; i < N; ++i) q[i] = r[i] / b;
    }
    return {prev_lo, prev_hi};
}

}  // namespace

double condition_number(const LinearOperator& A) {
    const std::size_t N = A.cols();
    if (N == 0) return 1.0;
    double lo, hi;
    if (N <= 600) {
        Eigen::MatrixXd G(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
        std::vector<double> e(N, 0.0), tmp(A.rows()), col(N);
        for (std::size_t j = 0; j < N; ++j) {
            std::fill(e.begin(), e.end(), 0.0);
            e[j] = 1.0;
            A.apply(e.data(), tmp.data());
            A.apply_transpose(tmp.data(), col.data());
            for (std::size_t i = 0; i < N; ++i) G(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
        lo = es.eigenvalues()(0);
        hi = es.eigenvalues()(static_cast<Eigen::Index>(N) - 1);
    } else {
        std::tie(lo, hi) = lanczos_extremes(A);
    }
    if (!(lo > 0)) return std::numeric_limits<double>::infinity();
    return std::sqrt(hi / lo);
}

}  // namespace hwr
