#include <doctest.h>

#include <cmath>

#include "hwr/density.hpp"
#include "hwr/errors.hpp"
#include "hwr/kde.hpp"
#include "oracles.hpp"

using namespace hwr;

TEST_CASE("Gaussian kernel constants") {
    const auto& k = gaussian_kernel();
    CHECK(k.l2_norm_sq() == doctest::Approx(1.0 / (2.0 * std::sqrt(M_PI))).epsilon(1e-15));
    CHECK(k.second_moment() == 1.0);
    CHECK(k.derivative(0.0, 4) == doctest::Approx(3.0 / std::sqrt(2 * M_PI)).epsilon(1e-15));
    CHECK(k.derivative(0.0, 6) == doctest::Approx(-15.0 / std::sqrt(2 * M_PI)).epsilon(1e-15));
    for (double u : {-1.3, 0.2, 2.5})
        for (int r = 1; r <= 4; ++r) {
            const double h = 1e-3;
            const double fd = (k.derivative(u + h, r - 1) - k.derivative(u - h, r - 1)) / (2 * h);
            CHECK(k.derivative(u, r) == doctest::Approx(fd).epsilon(1e-5));
        }
    CHECK(k.cdf(0.0) == 0.5);
}

TEST_CASE("cubic B-spline kernel constants") {
    const auto& k = bspline3_kernel();
    CHECK(k.half_support() == 1.5);
    CHECK(k.l2_norm_sq() == doctest::Approx(11.0 / 20.0).epsilon(1e-15));
    CHECK(k.second_moment() == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(oracle::integrate_pieces([&](double u) { return k.pdf(u); }, {-1.5, -0.5, 0.5, 1.5}) == doctest::Approx(1.0));
    CHECK(k.cdf(-2.0) == 0.0);
    CHECK(k.cdf(2.0) == 1.0);
    CHECK(k.cdf(0.0) == doctest::Approx(0.5));
}

TEST_CASE("bandwidth rules") {
    CHECK(BandwidthRule::parse("dpi").kind == BandwidthRule::Kind::Dpi);
    CHECK(BandwidthRule::parse("fixed:0.2").value == 0.2);
    CHECK_THROWS_AS(BandwidthRule::parse("fixed:-1"), Error);
    CHECK_THROWS_AS(BandwidthRule::parse("silverman"), Error);
}

TEST_CASE("sample statistics") {
    std::vector<double> y{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    CHECK(sample_std(y) == doctest::Approx(std::sqrt(55.0 / 6.0)));
    CHECK(quantile7(y, 0.25) == doctest::Approx(3.25));
    CHECK(quantile7(y, 0.75) == doctest::Approx(7.75));
    CHECK(iqr(y) == doctest::Approx(4.5));
    CHECK(bandwidth_rot(y) == doctest::Approx(1.06 * std::min(sample_std(y), 4.5 / 1.34) * std::pow(10.0, -0.2)));
    std::vector<double> heavy{-30, 0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 40};
    CHECK(bandwidth_rot(heavy) == doctest::Approx(1.06 * iqr(heavy) / 1.34 * std::pow(10.0, -0.2)));
    std::vector<double> spiky(100, 0.0);
    spiky[0] = 1.0;
    spiky[1] = -1.0;
    CHECK(bandwidth_rot(spiky) == doctest::Approx(1.06 * sample_std(spiky) * std::pow(100.0, -0.2)));
    CHECK_THROWS_AS(bandwidth_rot(std::vector<double>(5, 1.0)), Error);
}

TEST_CASE("functional estimate matches the double sum") {
    const auto Y = sample(*make_normal(), 300, 4);
    const double g = 0.4;
    for (int r : {4, 6}) {
        double s = 0.0;
        for (double a : Y)
            for (double b : Y) s += gaussian_kernel().derivative((a - b) / g, r);
        const double want = s / (Y.size() * Y.size() * std::pow(g, r + 1));
        CHECK(psi_r_hat(Y, g, r) == doctest::Approx(want).epsilon(1e-11));
    }
}

TEST_CASE("DPI bandwidth is near the AMISE optimum for normal data") {
    const auto Y = sample(*make_normal(), 10000, 17);
    const auto r = bandwidth_dpi_detail(Y);
    CHECK_FALSE(r.fallback);
    CHECK(r.psi6 < 0);
    CHECK(r.psi4 > 0);
    const double opt = sigma_amise(3.0 / (8.0 * std::sqrt(M_PI)), Y.size());
    CHECK(std::abs(r.sigma / opt - 1.0) < 0.25);
}

TEST_CASE("Gaussian KDE integrates to one and its transform inverts") {
    const auto Y = sample(*make_cauchy(), 400, 8);
    const auto e = gaussian_kde(Y, BandwidthRule::parse("dpi"));
    // mass on a window equals the cdf increment; total mass from the limits
    const double part = oracle::integrate([&](double y) { return kde_pdf(*e, y); }, -5.0, 5.0, 4000);
    CHECK(part == doctest::Approx(kde_transform(*e, 5.0) - kde_transform(*e, -5.0)).epsilon(1e-10));
    CHECK(kde_transform(*e, -1e7) == -0.5);
    CHECK(kde_transform(*e, 1e7) == 0.5);
    double brute = 0;
    for (double y : Y) brute += gaussian_kernel().pdf((0.3 - y) / e->sigma());
    CHECK(kde_pdf(*e, 0.3) == doctest::Approx(brute / (Y.size() * e->sigma())).epsilon(1e-13));
    for (double x : {-0.49, -0.2, 0.0, 0.13, 0.4999}) CHECK(kde_transform(*e, kde_inverse(*e, x)) == doctest::Approx(x).epsilon(1e-10));
    double prev = -1;
    for (double y = -20; y < 20; y += 0.37) {
        const double x = kde_transform(*e, y);
        CHECK(x >= prev);
        prev = x;
    }
}

TEST_CASE("boundary KDE on the unit interval") {
    const auto Y = sample(*make_uniform(), 500, 2);
    const auto e = estimate_transform(Y, DomainKind::UnitInterval, BandwidthRule::parse("dpi"));
    CHECK(e->kernel().kind() == KernelKind::BSpline3);
    CHECK(e->omega1() <= 0.0);
    CHECK(e->omega2() >= 1.0);
    CHECK(e->forward(e->omega1()) == doctest::Approx(-0.5));
    CHECK(e->forward(e->omega2()) == doctest::Approx(0.5));
    CHECK_FALSE(e->warnings().empty());
    CHECK_THROWS_AS(e->forward(e->omega2() + 1.0), Error);
    CHECK_THROWS_AS(boundary_kde({0.5, 1.5}), Error);
    for (double x : {-0.5, -0.3, 0.1, 0.5}) CHECK(e->forward(e->inverse(x)) == doctest::Approx(x).epsilon(1e-10));
}

TEST_CASE("KDE transform json roundtrip") {
    const auto Y = sample(*make_laplace(), 200, 1);
    const auto e = gaussian_kde(Y, BandwidthRule::parse("rot"));
    const auto back = EstimatedTransform::from_json(e->to_json());
    CHECK(back->sigma() == e->sigma());
    for (double y : {-3.0, 0.0, 2.5}) CHECK(back->forward(y) == e->forward(y));
}

TEST_CASE("single-sample and far-field values") {
    const EstimatedTransform e({0.0}, 1.0, KernelKind::Gaussian, DomainKind::RealLine);
    CHECK(kde_pdf(e, 0.0) == doctest::Approx(1.0 / std::sqrt(2 * M_PI)).epsilon(1e-15));
    CHECK(kde_transform(e, 0.0) == 0.0);
    CHECK(kde_inverse(e, 0.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(kde_pdf(e, 41.0) < 1e-300);
    CHECK_THROWS_AS(EstimatedTransform({0.0}, 0.0, KernelKind::Gaussian, DomainKind::RealLine), Error);
    CHECK_THROWS_AS(kde_inverse(e, 0.7), Error);
    const auto Y = sample(*make_normal(), 100, 12);
    const auto g = gaussian_kde(Y, BandwidthRule::parse("rot"));
    std::vector<double> xs;
    for (int i = 0; i < 100; ++i) xs.push_back(-0.495 + 0.0099 * i);
    double prev = -1e300;
    for (double x : xs) {
        const double y = kde_inverse(*g, x);
        CHECK(std::abs(kde_transform(*g, y) - x) < 1e-10);
        CHECK(y > prev);
        prev = y;
    }
}

TEST_CASE("kernel functional estimates: small cases and invariances") {
    const auto& k = gaussian_kernel();
    const double g = 0.7;
    for (int r : {4, 6}) {
        CHECK(psi_r_hat({1.3}, g, r) == doctest::Approx(k.derivative(0.0, r) / std::pow(g, r + 1)));
        CHECK(psi_r_hat({0.0, g}, g, r) ==
              doctest::Approx((2 * k.derivative(0.0, r) + 2 * k.derivative(1.0, r)) / (4 * std::pow(g, r + 1))));
        auto Y = sample(*make_laplace(), 200, 5);
        const double a = psi_r_hat(Y, 0.5, r);
        for (auto& y : Y) y += 17.0;
        CHECK(psi_r_hat(Y, 0.5, r) == doctest::Approx(a).epsilon(1e-10));
    }
    CHECK_THROWS_AS(psi_r_hat({0.0}, 0.0, 4), Error);
}

TEST_CASE("rule of thumb on two points and scaling") {
    // type-7 quartiles of {0,1}: 0.25 and 0.75
    CHECK(bandwidth_rot({0.0, 1.0}) == doctest::Approx(1.06 * std::min(1.0 / std::sqrt(2.0), 0.5 / 1.34) * std::pow(2.0, -0.2)));
    auto Y = sample(*make_cauchy(), 300, 2);
    const double s = bandwidth_rot(Y);
    for (auto& y : Y) y *= 3.5;
    CHECK(bandwidth_rot(Y) == doctest::Approx(3.5 * s));
}

TEST_CASE("Gaussian kernel derivatives against finite differences") {
    // central differences of k at 0 with Richardson extrapolation, long double arithmetic
    auto k = [](long double u) { return std::exp(-u * u / 2) / std::sqrt(2 * static_cast<long double>(M_PI)); };
    auto d4 = [&](long double h) { return (k(2 * h) - 4 * k(h) + 6 * k(0) - 4 * k(-h) + k(-2 * h)) / (h * h * h * h); };
    auto d6 = [&](long double h) {
        return (k(3 * h) - 6 * k(2 * h) + 15 * k(h) - 20 * k(0) + 15 * k(-h) - 6 * k(-2 * h) + k(-3 * h)) / std::pow(h, 6.0L);
    };
    const long double h = 0.02L;
    const long double r4 = (4 * d4(h / 2) - d4(h)) / 3, r6 = (4 * d6(h / 2) - d6(h)) / 3;
    CHECK(std::abs(gaussian_kernel().derivative(0.0, 4) - static_cast<double>(r4)) < 1e-6);
    CHECK(std::abs(gaussian_kernel().derivative(0.0, 6) - static_cast<double>(r6)) < 1e-6);
}

TEST_CASE("boundary support arithmetic and normalisation") {
    const double sigma = 0.05;
    const auto in = boundary_kde({0.2, 0.5, 0.9}, sigma);
    CHECK(in->omega1() == 0.0);
    CHECK(in->omega2() == 1.0);
    const auto at0 = boundary_kde({0.0, 0.5, 1.0}, sigma);
    CHECK(at0->omega1() == doctest::Approx(-1.5 * sigma));
    CHECK(at0->omega2() == doctest::Approx(1.0 + 1.5 * sigma));
    // piecewise cubic between kernel knots: Gauss-Legendre is exact there
    std::vector<double> br{at0->omega1(), at0->omega2()};
    for (double s : at0->samples())
        for (double t : {-1.5, -0.5, 0.5, 1.5}) br.push_back(s + t * sigma);
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
    br.erase(std::remove_if(br.begin(), br.end(), [&](double b) { return b < at0->omega1() || b > at0->omega2(); }), br.end());
    CHECK(oracle::integrate_pieces([&](double y) { return at0->pdf(y); }, br) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("DPI bandwidth is stable across seeds") {
    std::vector<double> c;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto Y = sample(*make_normal(), 10000, derive_seed(99, s));
        c.push_back(bandwidth_dpi(Y) * std::pow(1e4, 0.2));
    }
    double m = 0, v = 0;
    for (double x : c) m += x / c.size();
    for (double x : c) v += (x - m) * (x - m) / (c.size() - 1);
    CHECK(std::sqrt(v) / m < 0.1);
}
