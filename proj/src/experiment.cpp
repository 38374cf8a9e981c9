#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "hwr/errors.hpp"
#include "hwr/experiment.hpp"

namespace hwr {

namespace {

double f_gauss(const double* y, int d) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += y[i] * y[i];
    return std::exp(-s);
}

double f_interval(const double* y, int d) {
    double p = 1.0;
    for (int i = 0; i < d; ++i) {
        const double a = (y[i] - 0.5) * (y[i] + 0.5);
        p *= a * a * a;
    }
    return p;
}

double f_cube(const double* y, int d) {
    double p = 1.0;
    for (int i = 0; i < d; ++i) p *= y[i] * y[i] * y[i];
    return p;
}

double f_exp(const double* y, int d) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += y[i];
    return std::exp(s);
}

// y_6 term is 30 y^3 (1-y)^2, the form consistent with the reference GSIs
double f_eight(const double* y, int) {
    constexpr double two_pi = 6.283185307179586476925286766559;
    return 0.2 * y[0] * y[0] + 0.5 * std::cos(two_pi * y[2]) + std::exp(-y[3] * y[3]) + std::sqrt(y[4]) +
           30.0 * y[5] * y[5] * y[5] * (1.0 - y[5]) * (1.0 - y[5]) + 0.5 * std::abs(4.0 * y[6] - 2.0) +
           5.0 * std::exp(-y[0] * y[0] - y[4] * y[4]);
}

const std::vector<TestFunction>& registry() {
    static const std::vector<TestFunction> r{
        {"gauss", 0, f_gauss}, {"interval", 0, f_interval}, {"cube", 0, f_cube}, {"exp", 0, f_exp}, {"f8", 8, f_eight}};
    return r;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

const TestFunction& test_function(const std::string& name) {
    for (const auto& t : registry())
        if (t.name == name) return t;
    fail(ErrorKind::Config, "unknown test function '" + name + "'");
}

std::vector<std::string> test_function_names() {
    std::vector<std::string> out;
    for (const auto& t : registry()) out.push_back(t.name);
    return out;
}

std::map<Subset, double> f8_reference_gsi() {
    return {{{0}, 0.1065}, {{2}, 0.0893}, {{3}, 0.0588}, {{4}, 0.2872},
            {{5}, 0.0998}, {{6}, 0.0677}, {{0, 4}, 0.2908}};
}

double rmse(const std::vector<double>& pred, const std::vector<double>& ftrue) {
    if (pred.empty()) fail(ErrorKind::InvalidArgument, "rmse: empty test set");
    if (pred.size() != ftrue.size()) fail(ErrorKind::InvalidArgument, "rmse: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double e = pred[i] - ftrue[i];
        s += e * e;
    }
    return std::sqrt(s / static_cast<double>(pred.size()));
}

double rmse(const RegressionModel& model, const std::vector<double>& Ytest, const std::vector<double>& ftrue) {
    return rmse(model.predict(Ytest), ftrue);
}

std::size_t default_sample_count(std::size_t N, double c) {
    const double Nd = static_cast<double>(N);
    const double want = N > 1 ? std::ceil(c * Nd * std::log2(Nd)) : 1.0;
    return std::max<std::size_t>(static_cast<std::size_t>(want), N);
}

double fit_slope(const std::vector<int>& n, const std::vector<double>& r) {
    if (n.size() != r.size() || n.size() < 2) fail(ErrorKind::InvalidArgument, "fit_slope: need >= 2 points");
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n.size(); ++i) {
        if (!(r[i] > 0)) fail(ErrorKind::Numeric, "fit_slope: nonpositive rmse");
        sx += n[i];
        sy += std::log2(r[i]);
    }
    const double k = static_cast<double>(n.size());
    const double mx = sx / k, my = sy / k;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n.size(); ++i) {
        sxy += (n[i] - mx) * (std::log2(r[i]) - my);
        sxx += (n[i] - mx) * (n[i] - mx);
    }
    return sxy / sxx;
}

double median(std::vector<double> v) {
    if (v.empty()) fail(ErrorKind::InvalidArgument, "median of empty set");
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

DataSet make_data(const ExperimentConfig& cfg, std::size_t M, std::uint64_t seed) {
    DataSet ds;
    ds.M = M;
    ds.d = cfg.dim;
    ds.Y = sample_product(cfg.sampling_densities(), M, seed);
    const auto& tf = test_function(cfg.function);
    ds.f.resize(M);
    for (std::size_t i = 0; i < M; ++i) ds.f[i] = tf.eval(&ds.Y[i * cfg.dim], cfg.dim);
    return ds;
}

namespace {

FitOptions base_options(const ExperimentConfig& cfg) {
    FitOptions opt;
    opt.m = cfg.m;
    opt.eta_override = cfg.eta;
    opt.lsqr.atol = cfg.lsqr_tol;
    opt.lsqr.btol = cfg.lsqr_tol;
    return opt;
}

}  // namespace

ConvergenceResult run_convergence(const ExperimentConfig& cfg) {
    cfg.validate();
    ConvergenceResult res;
    const int count = cfg.n_max - cfg.n_min + 1;
    res.window = cfg.slope_window.value_or(std::make_pair(cfg.n_min + count / 2, cfg.n_max));
    const auto U = cfg.subset_list();
    const auto plans = cfg.plans();
    for (int s = 0; s < cfg.seeds; ++s) {
        const std::uint64_t seed_s = derive_seed(cfg.seed, static_cast<std::uint64_t>(s));
        std::vector<int> wn;
        std::vector<double> wr;
        for (int n = cfg.n_min; n <= cfg.n_max; ++n) {
            FitOptions opt = base_options(cfg);
            for (const auto& u : U) opt.terms.push_back({u, n});
            const std::size_t N = IndexSet(cfg.dim, opt.terms).size();
            const std::size_t M = cfg.samples.value_or(default_sample_count(N, cfg.oversampling));
            const std::size_t Mt = static_cast<std::size_t>(std::ceil(cfg.test_multiplier * static_cast<double>(M)));
            const auto train = make_data(cfg, M, derive_seed(seed_s, 2 * static_cast<std::uint64_t>(n)));
            const auto test = make_data(cfg, Mt, derive_seed(seed_s, 2 * static_cast<std::uint64_t>(n) + 1));
            const auto model = fit(train.Y, train.f, plans, opt);
            ConvergenceRow row;
            row.seed_index = s;
            row.n = n;
            row.N = N;
            row.M = M;
            row.rmse = rmse(model, test.Y, test.f);
            row.iterations = model.stats().iterations;
            if (cfg.condition) row.cond = condition_number(design_matrix(model, train.Y, M));
            res.rows.push_back(row);
            if (n >= res.window.first && n <= res.window.second) {
                wn.push_back(n);
                wr.push_back(row.rmse);
            }
        }
        res.slopes.push_back(wn.size() >= 2 ? fit_slope(wn, wr) : std::nan(""));
    }
    res.median_slope = median(res.slopes);
    return res;
}

std::string ConvergenceResult::to_csv(const std::string& config_hash) const {
    std::ostringstream o;
    o << csv_banner(config_hash);
    o << "# window=" << window.first << ":" << window.second << " median_slope=" << fmt(median_slope) << "\n";
    o << "seed,n,N,M,rmse,cond,iterations,slope\n";
    for (const auto& r : rows)
        o << r.seed_index << ',' << r.n << ',' << r.N << ',' << r.M << ',' << fmt(r.rmse) << ',' << fmt(r.cond) << ','
          << r.iterations << ',' << fmt(slopes[static_cast<std::size_t>(r.seed_index)]) << '\n';
    return o.str();
}

std::vector<Table1Row> run_table1(const std::vector<int>& ms, int n_min, int n_max) {
    if (n_min < 0 || n_max < n_min) fail(ErrorKind::InvalidArgument, "table1: bad level range");
    std::vector<Table1Row> rows;
    for (int m : ms) {
        for (int n = n_min; n <= n_max; ++n) {
            const double eta = (m - 1) / std::ldexp(1.0, n + 1);
            const auto g = gram_restricted(m, n, -0.5 + eta, 0.5);
            rows.push_back({m, n, eta, g.mu_min, g.mu_max});
        }
        const auto g = gram_restricted(m, n_max, -0.5, 0.5);
        rows.push_back({m, -1, 0.0, g.mu_min, g.mu_max});
    }
    return rows;
}

std::string table1_csv(const std::vector<Table1Row>& rows, const std::string& config_hash) {
    std::ostringstream o;
    o << csv_banner(config_hash);
    o << "m,n,eta,mu_min,mu_max\n";
    for (const auto& r : rows)
        o << r.m << ',' << (r.n < 0 ? std::string("torus") : std::to_string(r.n)) << ',' << fmt(r.eta) << ','
          << fmt(r.mu_min) << ',' << fmt(r.mu_max) << '\n';
    return o.str();
}

TwoStageResult run_two_stage(const ExperimentConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    const std::size_t M = cfg.samples.value_or(1000);
    const std::size_t Mt = static_cast<std::size_t>(std::ceil(cfg.test_multiplier * static_cast<double>(M)));
    const auto train = make_data(cfg, M, derive_seed(seed, 0));
    const auto test = make_data(cfg, Mt, derive_seed(seed, 1));

    TwoStageResult r;
    r.M = M;
    std::vector<std::string> warnings;
    const auto transforms = build_transforms(cfg.plans(), train.Y, M, &warnings);

    FitOptions opt1 = base_options(cfg);
    for (const auto& u : subsets_up_to(cfg.dim, std::min(cfg.stage1_order, cfg.dim))) opt1.terms.push_back({u, cfg.stage1_level});
    const auto model1 = fit(train.Y, train.f, transforms, opt1);
    r.stage1 = gsi(model1, cfg.eps);
    r.active = r.stage1.active_set;
    r.rmse1 = rmse(model1, test.Y, test.f);
    r.N1 = model1.index_set().size();

    FitOptions opt2 = base_options(cfg);
    for (const auto& u : r.active) {
        const std::size_t o = u.size();
        const int level = o < cfg.stage2_levels.size() ? cfg.stage2_levels[o] : cfg.stage2_levels.back();
        opt2.terms.push_back({u, level});
    }
    const auto model2 = fit(train.Y, train.f, transforms, opt2);
    r.stage2 = gsi(model2, cfg.eps);
    r.rmse2 = rmse(model2, test.Y, test.f);
    r.N2 = model2.index_set().size();

    r.warnings = warnings;
    for (const auto& w : model1.warnings()) r.warnings.push_back("stage1: " + w);
    for (const auto& w : model2.warnings()) r.warnings.push_back("stage2: " + w);
    return r;
}

nlohmann::json TwoStageResult::to_json() const {
    nlohmann::json act = nlohmann::json::array();
    for (const auto& u : active) act.push_back(subset_label(u));
    return {{"M", M},         {"N1", N1},       {"N2", N2},     {"rmse1", rmse1},
            {"rmse2", rmse2}, {"active", act},  {"stage1", stage1.to_json()}, {"stage2", stage2.to_json()},
            {"warnings", warnings}};
}

SparseDesignMatrix design_matrix(const RegressionModel& model, const std::vector<double>& Y, std::size_t M) {
    auto coords = model.transform_points(Y, M);
    return assemble(coords.view, model.index_set(), model.order());
}

}  // namespace hwr
