#include <doctest.h>

#include <random>
#include <set>

#include "hwr/errors.hpp"
#include "hwr/spline.hpp"
#include "hwr/wavelet_basis.hpp"
#include "oracles.hpp"

using namespace hwr;

TEST_CASE("subset labels") {
    CHECK(subset_label({}) == "{}");
    CHECK(subset_label({0, 4}) == "{1,5}");
    CHECK(parse_subset_label("{1,5}") == Subset{0, 4});
    CHECK(parse_subset_label("{ 3 }") == Subset{2});
    CHECK(parse_subset_label("{}").empty());
    CHECK_THROWS_AS(parse_subset_label("{0}"), Error);
    CHECK(parse_subset_label("1,2") == Subset{0, 1});
    CHECK_THROWS_AS(parse_subset_label("{1,x}"), Error);
    CHECK_THROWS_AS(parse_subset_label("{2,2}"), Error);
}

TEST_CASE("subsets up to order, canonical order") {
    const auto U = subsets_up_to(3, 2);
    REQUIRE(U.size() == 7);
    CHECK(U[0].empty());
    CHECK(U[1] == Subset{0});
    CHECK(U[3] == Subset{2});
    CHECK(U[4] == (Subset{0, 1}));
    CHECK(U[6] == (Subset{1, 2}));
    CHECK(subsets_up_to(8, 2).size() == 1 + 8 + 28);
}

TEST_CASE("index set cardinality") {
    for (int n = 0; n <= 6; ++n) {
        const auto I1 = build_index_set(1, n, subsets_up_to(1, 1));
        CHECK(I1.size() == (std::size_t{1} << (n + 1)));
        std::size_t pair = 0;
        for (int s = 0; s <= n; ++s) pair += static_cast<std::size_t>(s + 1) << s;
        const auto I2 = build_index_set(2, n, subsets_up_to(2, 2));
        CHECK(I2.size() == 1 + 2 * ((std::size_t{1} << (n + 1)) - 1) + pair);
    }
}

TEST_CASE("index set column bijection and anova classes") {
    const auto I = build_index_set(3, 3, subsets_up_to(3, 2));
    std::set<std::pair<std::vector<int>, std::vector<long long>>> seen;
    for (std::size_t c = 0; c < I.size(); ++c) {
        const auto e = I.entry(c);
        CHECK(I.column_of(e) == c);
        seen.insert({e.j, e.k});
        int sum = 0;
        for (int j : e.j) sum += std::max(j, 0);
        CHECK(sum <= 3);
        for (std::size_t i = 0; i < e.j.size(); ++i) {
            if (e.j[i] < 0) CHECK(e.k[i] == 0);
            else CHECK(e.k[i] < (1ll << e.j[i]));
        }
    }
    CHECK(seen.size() == I.size());
    CHECK(anova_class({-1, 2, 0}) == Subset{1, 2});
    CHECK(I.find_term({0, 2}) != nullptr);
    CHECK(I.find_term({0, 1, 2}) == nullptr);
    WaveletIndex bad{{5, -1, -1}, {0, 0, 0}};
    CHECK_FALSE(I.column_of(bad).has_value());
}

TEST_CASE("index set json roundtrip") {
    const auto I = build_index_set(2, {{{}, 0}, {{0}, 4}, {{1}, 2}, {{0, 1}, 3}});
    const auto J = IndexSet::from_json(I.to_json());
    REQUIRE(J.size() == I.size());
    for (std::size_t c = 0; c < I.size(); ++c) CHECK(J.entry(c) == I.entry(c));
}

TEST_CASE("empty set is required") {
    CHECK_THROWS_AS(build_index_set(2, 2, {{0}}), Error);
}

TEST_CASE("torus wrap") {
    CHECK(wrap_torus(0.5) == -0.5);
    CHECK(wrap_torus(-0.5) == -0.5);
    CHECK(wrap_torus(1.25) == doctest::Approx(0.25));
    CHECK(wrap_torus(-0.75) == doctest::Approx(0.25));
}

TEST_CASE("active translates agree with brute force periodic evaluation") {
    std::mt19937_64 g(11);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int m = 1; m <= 4; ++m) {
        const auto psi = chui_wang_wavelet(m);
        for (int j = 0; j <= 5; ++j) {
            for (int t = 0; t < 30; ++t) {
                const double x = t == 0 ? -0.5 : u(g);
                Translate out[16];
                const int cnt = active_translates(m, j, x, out);
                std::vector<double> dense(static_cast<std::size_t>(1) << j, 0.0);
                for (int i = 0; i < cnt; ++i) dense[static_cast<std::size_t>(out[i].k)] = out[i].value;
                for (long long k = 0; k < (1ll << j); ++k) {
                    // explicit sum over integer shifts of the scaled wavelet
                    double want = 0.0;
                    const double s = std::ldexp(1.0, j);
                    for (int r = -2 * m - 2; r <= 2 * m + 2; ++r) {
                        const double z = s * (x + r) - static_cast<double>(k);
                        if (z >= 0 && z < 2 * m - 1) want += psi(z);
                    }
                    want *= std::sqrt(s);
                    CHECK(dense[static_cast<std::size_t>(k)] == doctest::Approx(want).epsilon(1e-12).scale(1.0));
                    CHECK(eval_periodic(m, j, k, x) == doctest::Approx(want).epsilon(1e-12).scale(1.0));
                }
            }
        }
    }
}

TEST_CASE("periodic wavelets are 1-periodic, have zero mean, and levels are orthogonal") {
    for (int m = 1; m <= 3; ++m) {
        CHECK(eval_periodic(m, 2, 1, 0.3) == doctest::Approx(eval_periodic(m, 2, 1, 1.3)));
        const auto br = oracle::grid(-0.5, 0.5, 64);
        for (int j = 0; j <= 3; ++j) {
            const double mean = oracle::integrate_pieces([&](double x) { return eval_periodic(m, j, 0, x); }, br);
            CHECK(std::abs(mean) < 1e-13);
            for (int jj = j + 1; jj <= 3; ++jj) {
                const double ip = oracle::integrate_pieces(
                    [&](double x) { return eval_periodic(m, j, 0, x) * eval_periodic(m, jj, 1, x); }, br);
                CHECK(std::abs(ip) < 1e-12);
            }
        }
    }
}

TEST_CASE("basis evaluation is a tensor product") {
    WaveletIndex idx{{2, -1, 1}, {3, 0, 1}};
    const double x[3] = {0.1, -0.3, 0.44};
    CHECK(eval_basis(2, idx, x) == doctest::Approx(eval_periodic(2, 2, 3, 0.1) * eval_periodic(2, 1, 1, 0.44)));
}
