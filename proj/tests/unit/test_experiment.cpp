#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "hwr/errors.hpp"
#include "hwr/experiment.hpp"

using namespace hwr;

TEST_CASE("rmse") {
    CHECK(rmse({1, 2, 3}, {1, 2, 3}) == 0.0);
    CHECK(rmse({2, 2}, {5, 5}) == 3.0);
    std::vector<double> p{0.1, -0.7, 2.2, 1e-3}, t{0.0, 0.5, 2.0, 0.0};
    double m = 0;
    for (std::size_t i = 0; i < p.size(); ++i) m += (p[i] - t[i]) * (p[i] - t[i]) / p.size();
    CHECK(std::abs(rmse(p, t) - std::sqrt(m)) < 1e-14);
    CHECK_THROWS_AS(rmse(std::vector<double>{}, std::vector<double>{}), Error);
}

TEST_CASE("slope, median, sample count") {
    std::vector<int> n{2, 3, 4, 5};
    std::vector<double> r;
    for (int k : n) r.push_back(7.0 * std::pow(2.0, -2.5 * k));
    CHECK(fit_slope(n, r) == doctest::Approx(-2.5));
    CHECK(median({3, 1, 2}) == 2);
    CHECK(median({4, 1, 2, 3}) == 2.5);
    CHECK(default_sample_count(1024, 1.0) == 10240);
    CHECK(default_sample_count(2, 0.1) == 2);
}

TEST_CASE("test functions") {
    const double y[8] = {0.5, 9, 0.25, 0.0, 4.0, 0.5, 0.75, 0.3};
    const double want = 0.2 * 0.25 + 0.5 * std::cos(M_PI / 2) + 1.0 + 2.0 + 30.0 * 0.125 * 0.25 + 0.5 + 5.0 * std::exp(-0.25 - 16.0);
    CHECK(test_function("f8").eval(y, 8) == doctest::Approx(want));
    const double z[2] = {0.1, -0.2};
    CHECK(test_function("gauss").eval(z, 2) == doctest::Approx(std::exp(-0.05)));
    CHECK(test_function("interval").eval(z, 1) == doctest::Approx(std::pow(0.1 * 0.1 - 0.25, 3)));
    CHECK(test_function("cube").eval(z, 1) == doctest::Approx(1e-3));
    CHECK(test_function("exp").eval(z, 1) == doctest::Approx(std::exp(0.1)));
    CHECK_THROWS_AS(test_function("nope"), Error);
    double s = 0;
    for (const auto& [u, v] : f8_reference_gsi()) s += v;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("config parsing and validation") {
    auto c = ExperimentConfig::from_json({{"function", "gauss"}, {"dim", 2}, {"densities", "cauchy"}});
    CHECK(c.densities.size() == 2);
    CHECK(c.transforms.size() == 2);
    CHECK(c.subset_list().size() == 4);
    CHECK_THROWS_AS(ExperimentConfig::from_json({{"functon", "gauss"}}), Error);
    CHECK_THROWS_AS(ExperimentConfig::from_json({{"function", "f8"}, {"dim", 3}}), Error);
    CHECK_THROWS_AS(ExperimentConfig::from_json({{"dim", 2}, {"densities", {"normal"}}}), Error);
    CHECK_THROWS_AS(ExperimentConfig::from_json({{"m", "two"}}), Error);
    CHECK_THROWS_AS(ExperimentConfig::from_json({{"transforms", {{"kde", "magic"}}}}), Error);
    CHECK_THROWS_AS(ExperimentConfig::from_json({{"subsets", {"{2}"}}}), Error);
    CHECK_THROWS_AS(ExperimentConfig::load("/nonexistent/config.json"), Error);
    const auto e = ExperimentConfig::from_json({{"preset", "eight-dim"}});
    CHECK(e.dim == 8);
    CHECK(e.plans()[6].kind == TransformPlan::Kind::Kde);
    CHECK(e.plans()[6].domain == DomainKind::UnitInterval);
    CHECK(e.hash() == ExperimentConfig::from_json(e.to_json()).hash());
    CHECK(e.hash() != c.hash());
    try {
        ExperimentConfig::from_json({{"seeds", 0}});
        FAIL("expected a config error");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::Config);
    }
}

TEST_CASE("convergence run is deterministic and carries the config hash") {
    const auto cfg = ExperimentConfig::from_json(
        {{"function", "gauss"}, {"densities", "normal"}, {"m", 2}, {"n_min", 2}, {"n_max", 5}, {"seeds", 2}});
    const auto a = run_convergence(cfg).to_csv(cfg.hash());
    const auto b = run_convergence(cfg).to_csv(cfg.hash());
    CHECK(a == b);
    CHECK(a.rfind(std::string("# hwr ") + kVersion + " config=" + cfg.hash(), 0) == 0);
    const auto r = run_convergence(cfg);
    CHECK(r.rows.size() == 8);
    CHECK(r.window == std::make_pair(4, 5));
    CHECK(r.slopes.size() == 2);
    CHECK(r.rows.back().N == 64);
    CHECK(r.rows.back().M == 384);
}

TEST_CASE("table1 rows") {
    const auto rows = run_table1({2}, 2, 3);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].eta == 0.125);
    CHECK(rows[0].mu_min == doctest::Approx(0.0896).epsilon(0.002 / 0.0896));
    CHECK(rows[2].n == -1);
    const auto csv = table1_csv(rows, "abc");
    CHECK(csv.find("2,torus,0,") != std::string::npos);
}

TEST_CASE("two-stage pipeline on a small problem") {
    auto cfg = ExperimentConfig::from_json({{"function", "gauss"},
                                            {"dim", 3},
                                            {"densities", "normal"},
                                            {"transforms", "known"},
                                            {"samples", 600},
                                            {"stage1_level", 2},
                                            {"stage2_levels", {0, 4, 2}}});
    const auto r = run_two_stage(cfg, 1);
    CHECK(r.N1 > 0);
    CHECK(r.M == 600);
    CHECK(r.active.front().empty());
    CHECK(r.stage1.find({0}) != nullptr);
    CHECK(r.to_json().contains("rmse2"));
}

TEST_CASE("csv io") {
    const std::string path = "hwr_test_io.csv";
    write_text(path, "# banner\ny1,f\n1,2\n3.5,-4e-3\n");
    const auto t = read_csv(path);
    CHECK(t.header == std::vector<std::string>{"y1", "f"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[1][1] == -4e-3);
    write_text(path, "1,2\n3\n");
    CHECK_THROWS_AS(read_csv(path), Error);
    write_text(path, "a,b\n1,x\n");
    CHECK_THROWS_AS(read_csv(path), Error);
    std::remove(path.c_str());
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
}
