#include <doctest.h>

#include <random>

#include "hwr/errors.hpp"
#include "hwr/sensitivity.hpp"
#include "hwr/spline.hpp"

using namespace hwr;

namespace {

std::vector<TransformPtr> torus(int d) {
    return std::vector<TransformPtr>(static_cast<std::size_t>(d), make_transform(make_torus_uniform()));
}

RegressionModel model_with(const IndexSet& idx, std::vector<double> c, int m = 2) {
    return RegressionModel(m, idx, torus(idx.dim()), std::vector<double>(idx.terms().size(), 0.0), std::move(c));
}

}  // namespace

TEST_CASE("single level-0 wavelet has its squared norm as variance") {
    for (int m = 1; m <= 3; ++m) {
        const auto idx = build_index_set(2, 2, subsets_up_to(2, 2));
        std::vector<double> c(idx.size(), 0.0);
        WaveletIndex w{{0, -1}, {0, 0}};
        c[*idx.column_of(w)] = 1.0;
        const auto model = model_with(idx, c, m);
        // <psi^per_00, psi^per_00> = sum_l c_l
        double want = 0.0;
        const auto ac = wavelet_autocorrelation(m);
        want += to_double(ac[0]);
        for (std::size_t l = 1; l < ac.size(); ++l) want += 2.0 * to_double(ac[l]);
        CHECK(term_variance(model, {0}) == doctest::Approx(want).epsilon(1e-13));
        CHECK(term_variance(model, {1}) == 0.0);
        const auto rep = gsi(model);
        CHECK(rep.find({0})->gsi == doctest::Approx(1.0));
        CHECK(rep.active_set == std::vector<Subset>{{}, {0}});
    }
}

TEST_CASE("constant model is degenerate") {
    const auto idx = build_index_set(1, 2, subsets_up_to(1, 1));
    std::vector<double> c(idx.size(), 0.0);
    c[0] = 3.0;
    const auto model = model_with(idx, c);
    CHECK(term_variance(model, {0}) == 0.0);
    CHECK_THROWS_AS(gsi(model), Error);
    CHECK_THROWS_AS(term_variance(model, {1}), Error);
    CHECK_THROWS_AS(term_variance(model, {}), Error);
}

TEST_CASE("term variance equals the torus variance of the term") {
    const auto idx = build_index_set(2, 4, subsets_up_to(2, 2));
    std::mt19937_64 g(3);
    std::normal_distribution<double> nd;
    std::vector<double> c(idx.size());
    for (auto& v : c) v = nd(g);
    const auto model = model_with(idx, c);
    const double var_sum = term_variance(model, {0}) + term_variance(model, {1}) + term_variance(model, {0, 1});
    // midpoint rule is exact up to rounding for these piecewise polynomials? no; use a fine grid
    const int n = 512;
    double s = 0, s2 = 0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const double x[2] = {-0.5 + (a + 0.5) / n, -0.5 + (b + 0.5) / n};
            const double v = model.predict(x);
            s += v;
            s2 += v * v;
        }
    const double mean = s / (n * n);
    CHECK(s2 / (n * n) - mean * mean == doctest::Approx(var_sum).epsilon(2e-3));
    CHECK(mean == doctest::Approx(c[0]).epsilon(1e-6));
    const auto rep = gsi(model);
    double tot = 0;
    for (const auto& t : rep.terms) {
        CHECK(t.variance >= 0.0);
        tot += t.gsi;
    }
    CHECK(tot == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(rep.constant == c[0]);
}

TEST_CASE("GSIs are invariant under adding a constant") {
    const auto Y = sample_product({make_normal(), make_normal()}, 800, 4);
    std::vector<double> f(800), f10(800);
    for (std::size_t i = 0; i < 800; ++i) {
        f[i] = std::exp(-Y[2 * i] * Y[2 * i]) + 0.3 * Y[2 * i + 1] / (1 + Y[2 * i + 1] * Y[2 * i + 1]) +
               0.2 * std::exp(-(Y[2 * i] * Y[2 * i] + Y[2 * i + 1] * Y[2 * i + 1]));
        f10[i] = f[i] + 10.0;
    }
    FitOptions opt;
    for (const auto& u : subsets_up_to(2, 2)) opt.terms.push_back({u, 3});
    opt.lsqr.atol = opt.lsqr.btol = 1e-14;
    const auto T = std::vector<TransformPtr>{make_transform(make_normal()), make_transform(make_normal())};
    const auto a = gsi(fit(Y, f, T, opt)), b = gsi(fit(Y, f10, T, opt));
    for (std::size_t i = 0; i < a.terms.size(); ++i) CHECK(std::abs(a.terms[i].gsi - b.terms[i].gsi) < 1e-6);
    CHECK(b.constant - a.constant == doctest::Approx(10.0).epsilon(1e-6));
}

TEST_CASE("effective dimension and active set") {
    SensitivityReport r;
    r.terms = {{{0}, 0.4, 0.4, false}, {{1}, 0.3, 0.3, false}, {{0, 1}, 0.3, 0.3, false}};
    r.total_variance = 1.0;
    CHECK(effective_dimension(r, 0.9) == 2);
    CHECK(effective_dimension(r, 0.7) == 1);
    CHECK(effective_dimension(r, 1.0) == 2);
    CHECK(active_set(r, 0.0).size() == 4);
    CHECK(active_set(r, 1.0) == std::vector<Subset>{{}});
    CHECK(active_set(r, 0.35) == std::vector<Subset>{{}, {0}});
    SensitivityReport add;
    add.terms = {{{0}, 0.5, 0.5, false}, {{1}, 0.5, 0.5, false}, {{0, 1}, 0.0, 0.0, false}};
    add.total_variance = 1.0;
    CHECK(effective_dimension(add, 1.0) == 1);
}

TEST_CASE("report serialisation") {
    const auto idx = build_index_set(2, 1, subsets_up_to(2, 2));
    std::vector<double> c(idx.size(), 0.5);
    const auto rep = gsi(model_with(idx, c), 0.1);
    const auto csv = rep.to_csv();
    CHECK(csv.rfind("u,variance,gsi,active\n", 0) == 0);
    CHECK(csv.find("\"{1,2}\"") != std::string::npos);
    const auto j = rep.to_json();
    CHECK(j["threshold"] == 0.1);
}
