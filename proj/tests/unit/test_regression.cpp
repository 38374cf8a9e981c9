#include <doctest.h>

#include <random>

#include <Eigen/Dense>

#include "hwr/errors.hpp"
#include "hwr/regression.hpp"
#include "hwr/spline.hpp"

using namespace hwr;

namespace {

std::vector<double> uniform_torus(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 g(seed);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    std::vector<double> v(n);
    for (auto& x : v) x = u(g);
    return v;
}

std::vector<TransformPtr> torus_transforms(int d) {
    return std::vector<TransformPtr>(static_cast<std::size_t>(d), make_transform(make_torus_uniform()));
}

}  // namespace

TEST_CASE("assembled entries equal direct basis evaluation") {
    for (int m = 1; m <= 3; ++m) {
        const int d = 3;
        const auto idx = build_index_set(d, 3, subsets_up_to(d, 2));
        const std::size_t M = 40;
        const auto X = uniform_torus(M * d, 1 + m);
        const auto A = assemble(X, idx, m);
        REQUIRE(A.rows() == M);
        REQUIRE(A.cols() == idx.size());
        for (std::size_t i = 0; i < M; ++i)
            for (std::size_t c = 0; c < idx.size(); ++c)
                CHECK(std::abs(A.entry(i, c) - eval_basis(m, idx.entry(c), &X[i * d])) < 1e-13);
    }
}

TEST_CASE("sparse products agree with dense and matrix-free operators") {
    const int d = 2, m = 2;
    const auto idx = build_index_set(d, 4, subsets_up_to(d, 2));
    const std::size_t M = 200;
    const auto X = uniform_torus(M * d, 3);
    const auto A = assemble(X, idx, m);
    const Eigen::MatrixXd D = A.to_dense();
    MatrixFreeOperator F(uniform_coordinates(X, d, idx), idx, m);
    std::vector<double> x = uniform_torus(A.cols(), 4), r = uniform_torus(M, 5);
    std::vector<double> y1(M), y2(M), z1(A.cols()), z2(A.cols());
    A.apply(x.data(), y1.data());
    F.apply(x.data(), y2.data());
    const Eigen::VectorXd yd = D * Eigen::Map<Eigen::VectorXd>(x.data(), x.size());
    for (std::size_t i = 0; i < M; ++i) {
        CHECK(y1[i] == doctest::Approx(yd[i]).epsilon(1e-13).scale(1.0));
        CHECK(y2[i] == doctest::Approx(yd[i]).epsilon(1e-13).scale(1.0));
    }
    A.apply_transpose(r.data(), z1.data());
    F.apply_transpose(r.data(), z2.data());
    const Eigen::VectorXd zd = D.transpose() * Eigen::Map<Eigen::VectorXd>(r.data(), r.size());
    for (std::size_t c = 0; c < A.cols(); ++c) {
        CHECK(z1[c] == doctest::Approx(zd[c]).epsilon(1e-12).scale(1.0));
        CHECK(z2[c] == doctest::Approx(zd[c]).epsilon(1e-12).scale(1.0));
    }
    const Eigen::MatrixXd G = A.normal_matrix();
    CHECK((G - D.transpose() * D).norm() < 1e-10 * G.norm());
}

TEST_CASE("LSQR matches dense normal equations") {
    std::mt19937_64 g(21);
    std::normal_distribution<double> nd;
    for (int t = 0; t < 10; ++t) {
        Eigen::MatrixXd A(50, 10);
        for (int i = 0; i < A.size(); ++i) A.data()[i] = nd(g);
        std::vector<double> b(50);
        for (auto& v : b) v = nd(g);
        const auto res = lsqr(DenseOperator(A), b);
        CHECK(res.converged);
        const Eigen::VectorXd bb = Eigen::Map<Eigen::VectorXd>(b.data(), 50);
        const Eigen::VectorXd ref = (A.transpose() * A).ldlt().solve(A.transpose() * bb);
        for (int i = 0; i < 10; ++i) CHECK(std::abs(res.x[static_cast<std::size_t>(i)] - ref[i]) < 1e-8);
        CHECK(res.residual_norm == doctest::Approx((bb - A * ref).norm()).epsilon(1e-10));
    }
}

TEST_CASE("LSQR edge cases") {
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(4, 3);
    const auto z = lsqr(DenseOperator(A), std::vector<double>(4, 0.0));
    CHECK(z.x == std::vector<double>(3, 0.0));
    CHECK(z.iterations == 0);
    CHECK_THROWS_AS(lsqr(DenseOperator(A), std::vector<double>(3, 1.0)), Error);
    LsqrOptions o;
    o.max_iter = 1;
    Eigen::MatrixXd B(5, 3);
    B << 1, 2, 3, 4, 5, 6, 7, 8, 10, 1, 0, 1, 2, 2, 2;
    const auto r = lsqr(DenseOperator(B), {1, 2, 3, 4, 5}, o);
    CHECK(r.iterations == 1);
    CHECK_FALSE(r.converged);
}

TEST_CASE("condition number against SVD") {
    std::mt19937_64 g(2);
    std::normal_distribution<double> nd;
    Eigen::MatrixXd A(80, 12);
    for (int i = 0; i < A.size(); ++i) A.data()[i] = nd(g);
    A.col(3) *= 50.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    const auto s = svd.singularValues();
    CHECK(condition_number(DenseOperator(A)) == doctest::Approx(s[0] / s[s.size() - 1]).epsilon(1e-8));
    // large N goes through Lanczos
    const int d = 1, m = 2;
    const auto idx = build_index_set(d, 9, subsets_up_to(1, 1));
    const auto X = uniform_torus(12000, 8);
    const auto S = assemble(X, idx, m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S.normal_matrix());
    const double want = std::sqrt(es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff());
    CHECK(condition_number(S) == doctest::Approx(want).epsilon(1e-6));
}

TEST_CASE("fit reproduces a function in the span") {
    const int d = 2, m = 2;
    const auto idx = build_index_set(d, 3, subsets_up_to(d, 2));
    std::vector<double> truth(idx.size());
    std::mt19937_64 g(6);
    std::normal_distribution<double> nd;
    for (auto& v : truth) v = nd(g);
    const RegressionModel gen(m, idx, torus_transforms(d), std::vector<double>(idx.terms().size(), 0.0), truth);
    const std::size_t M = 2000;
    const auto X = uniform_torus(M * d, 7);
    const auto f = gen.predict(X);
    FitOptions opt;
    opt.m = m;
    for (const auto& u : subsets_up_to(d, 2)) opt.terms.push_back({u, 3});
    opt.lsqr.atol = opt.lsqr.btol = 1e-14;
    const auto model = fit(X, f, torus_transforms(d), opt);
    for (std::size_t c = 0; c < truth.size(); ++c) CHECK(model.coefficients()[c] == doctest::Approx(truth[c]).epsilon(1e-8).scale(1.0));
    CHECK(model.stats().converged);
}

TEST_CASE("model json roundtrip predicts identically") {
    const auto Y = sample_product({make_normal(), make_uniform()}, 500, 3);
    std::vector<double> f(500);
    for (std::size_t i = 0; i < 500; ++i) f[i] = std::exp(-Y[2 * i] * Y[2 * i]) + Y[2 * i + 1];
    FitOptions opt;
    opt.m = 2;
    for (const auto& u : subsets_up_to(2, 2)) opt.terms.push_back({u, 3});
    const auto model = fit(Y, f, std::vector<TransformPlan>{TransformPlan::kde(DomainKind::RealLine, BandwidthRule::parse("dpi")),
                                                           TransformPlan::known(make_uniform())},
                           opt);
    const auto back = RegressionModel::from_json(nlohmann::json::parse(model.to_json().dump()));
    const auto p1 = model.predict(Y), p2 = back.predict(Y);
    CHECK(p1 == p2);
    CHECK(back.stats().iterations == model.stats().iterations);
    CHECK(back.term_eta() == model.term_eta());
}

TEST_CASE("fit input validation and warnings") {
    FitOptions opt;
    opt.terms = {{{}, 0}, {{0}, 6}};
    const auto T = torus_transforms(1);
    CHECK_THROWS_AS(fit({0.1, 0.2}, {1.0}, T, opt), Error);
    CHECK_THROWS_AS(fit({0.1}, {std::nan("")}, T, opt), Error);
    const auto X = uniform_torus(50, 1);
    const auto model = fit(X, std::vector<double>(50, 1.0), T, opt);
    bool warned = false;
    for (const auto& w : model.warnings()) warned |= w.find("oversampling") != std::string::npos;
    CHECK(warned);
    // underdetermined: interpolates the data
    CHECK(model.predict(std::vector<double>{X[7]})[0] == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("extension parameter per term follows the term's dimension") {
    FitOptions opt;
    opt.m = 3;
    opt.terms = {{{}, 0}, {{0}, 4}, {{0, 1}, 4}};
    const auto Y = sample_product({make_uniform(), make_uniform()}, 400, 1);
    std::vector<double> f(400, 0.0);
    const auto model = fit(Y, f, std::vector<TransformPlan>{TransformPlan::known(make_uniform()), TransformPlan::known(make_uniform())}, opt);
    CHECK(model.term_eta()[1] == doctest::Approx(default_eta(3, 4, 1)));
    CHECK(model.term_eta()[2] == doctest::Approx(default_eta(3, 4, 2)));
}

TEST_CASE("torus Gram: exact Riesz bounds") {
    const auto g2 = gram_restricted(2, 5, -0.5, 0.5);
    CHECK(g2.mu_max == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(g2.mu_min == doctest::Approx(4.0 / 27.0).epsilon(1e-10));
    const auto row = level_gram_row(2, 3);
    const auto G = level_gram(2, 3);
    for (int k = 0; k < 8; ++k) CHECK(G(0, k) == doctest::Approx(row[static_cast<std::size_t>(k)]));
    // against quadrature on the periodic functions
    for (int k = 0; k < 8; ++k) {
        double q = 0.0;
        const int cells = 2048;
        for (int c = 0; c < cells; ++c) {
            const double x = -0.5 + (c + 0.5) / cells;
            q += eval_periodic(2, 3, 0, x) * eval_periodic(2, 3, k, x) / cells;
        }
        CHECK(row[static_cast<std::size_t>(k)] == doctest::Approx(q).epsilon(1e-5).scale(1.0));
    }
}
