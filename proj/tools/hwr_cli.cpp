#include <charconv>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "hwr/errors.hpp"
#include "hwr/experiment.hpp"
#include "hwr/simd.hpp"

using namespace hwr;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string t;
    while (std::getline(ss, t, sep)) out.push_back(t);
    return out;
}

template <class T>
T parse_number(const std::string& s, const char* what) {
    T v{};
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size() || s.empty())
        fail(ErrorKind::Config, std::string("bad ") + what + " '" + s + "'");
    return v;
}

// known:<density>[:<param>] | kde:<rule>[:<domain>]   e.g. known:beta:0.5, kde:dpi, kde:rot:unit
TransformPlan parse_plan(const std::string& s) {
    auto p = split(s, ':');
    if (p.size() >= 2 && p[0] == "known") {
        nlohmann::json spec = {{"name", p[1]}};
        if (p.size() == 3) spec["alpha"] = parse_number<double>(p[2], "density parameter");
        return TransformPlan::known(make_density(spec));
    }
    if (p.size() >= 2 && p[0] == "kde") {
        std::string rule = p[1];
        std::size_t next = 2;
        if (rule == "fixed") {
            if (p.size() < 3) fail(ErrorKind::Config, "kde:fixed needs a bandwidth");
            rule += ":" + p[2];
            next = 3;
        }
        DomainKind dom = p.size() > next ? parse_domain(p[next]) : DomainKind::RealLine;
        return TransformPlan::kde(dom, BandwidthRule::parse(rule));
    }
    fail(ErrorKind::Config, "bad transform '" + s + "'");
}

std::vector<Subset> parse_subsets(const std::string& s, int d) {
    if (s == "full") return subsets_up_to(d, d);
    if (!s.empty() && s.find('{') == std::string::npos) return subsets_up_to(d, std::min(parse_number<int>(s, "subset order"), d));
    std::vector<Subset> U{Subset{}};
    for (const auto& lab : split(s, ';'))
        if (!lab.empty()) U.push_back(parse_subset_label(lab));
    sort_subsets(U);
    return U;
}

void print_stats(const RegressionModel& model) {
    const auto& st = model.stats();
    std::fprintf(stderr, "N=%zu iterations=%zu residual=%.6g normal_residual=%.6g acond=%.6g stop=%s\n",
                 model.index_set().size(), st.iterations, st.residual_norm, st.normal_residual_norm, st.acond_estimate,
                 st.stop_reason.c_str());
    for (const auto& w : model.warnings()) std::fprintf(stderr, "warning: %s\n", w.c_str());
}

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Config, "cannot open " + path);
    try {
        nlohmann::json j;
        in >> j;
        return j;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Config, path + ": " + e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hyperbolic wavelet regression with density transforms"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    // fit
    auto* cfit = app.add_subcommand("fit", "fit a model to headered CSV data (y_1..y_d, f)");
    std::string fit_data, fit_out = "model.json", fit_subsets = "full";
    std::vector<std::string> fit_transforms;
    int fit_m = 2, fit_n = 4;
    std::optional<double> fit_eta;
    double fit_tol = 1e-10;
    bool fit_cond = false;
    cfit->add_option("--data", fit_data, "training CSV")->required();
    cfit->add_option("--out", fit_out, "model JSON");
    cfit->add_option("--m", fit_m, "wavelet order");
    cfit->add_option("--n", fit_n, "maximal level");
    cfit->add_option("--subsets", fit_subsets, "full | order | {1};{1,2};...");
    cfit->add_option("--transform", fit_transforms,
                     "per-dimension transform (known:<density>[:alpha] | kde:<rot|dpi|fixed:v>[:domain]); one value is "
                     "broadcast")
        ->required();
    cfit->add_option("--eta", fit_eta, "override extension parameter");
    cfit->add_option("--tol", fit_tol, "LSQR tolerance");
    cfit->add_flag("--cond", fit_cond, "report cond(A)");

    // predict
    auto* cpred = app.add_subcommand("predict", "evaluate a model on CSV points");
    std::string pred_model, pred_data, pred_out = "-";
    cpred->add_option("--model", pred_model)->required();
    cpred->add_option("--data", pred_data, "CSV with d columns, or d+1 with truth last")->required();
    cpred->add_option("--out", pred_out);

    // converge
    auto* cconv = app.add_subcommand("converge", "RMSE decay over a level sweep");
    std::string conv_config, conv_out = "-";
    std::optional<int> conv_m, conv_nmin, conv_nmax, conv_seeds;
    std::optional<std::uint64_t> conv_seed;
    cconv->add_option("--config", conv_config)->required();
    cconv->add_option("--out", conv_out);
    cconv->add_option("--m", conv_m);
    cconv->add_option("--nmin", conv_nmin);
    cconv->add_option("--nmax", conv_nmax);
    cconv->add_option("--seeds", conv_seeds);
    cconv->add_option("--seed", conv_seed);

    // table1
    auto* ct1 = app.add_subcommand("table1", "extremal Gram eigenvalues on the restricted interval");
    std::vector<int> t1_m{2, 3};
    int t1_nmin = 2, t1_nmax = 7;
    std::string t1_out = "-";
    ct1->add_option("--m", t1_m);
    ct1->add_option("--nmin", t1_nmin);
    ct1->add_option("--nmax", t1_nmax);
    ct1->add_option("--out", t1_out);

    // two-stage
    auto* c2s = app.add_subcommand("two-stage", "GSI screening followed by a refit on the active terms");
    std::string ts_config, ts_out = "-", ts_gsi;
    std::optional<std::uint64_t> ts_seed;
    std::optional<std::size_t> ts_samples;
    c2s->add_option("--config", ts_config, "JSON config (default: the 8-d benchmark)");
    c2s->add_option("--seed", ts_seed);
    c2s->add_option("--samples", ts_samples);
    c2s->add_option("--out", ts_out, "JSON report");
    c2s->add_option("--gsi-csv", ts_gsi, "stage-1 GSI table");

    // gsi
    auto* cgsi = app.add_subcommand("gsi", "global sensitivity indices of a fitted model");
    std::string gsi_model, gsi_out = "-", gsi_format = "csv";
    double gsi_eps = 0.03;
    cgsi->add_option("--model", gsi_model)->required();
    cgsi->add_option("--eps", gsi_eps);
    cgsi->add_option("--format", gsi_format)->check(CLI::IsMember({"csv", "json"}));
    cgsi->add_option("--out", gsi_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*cfit) {
            const auto tab = read_csv(fit_data);
            if (tab.rows.empty() || tab.rows.front().size() < 2) fail(ErrorKind::Data, "fit: need rows with >= 2 columns");
            const int d = static_cast<int>(tab.rows.front().size()) - 1;
            std::vector<double> Y, f;
            for (const auto& r : tab.rows) {
                Y.insert(Y.end(), r.begin(), r.end() - 1);
                f.push_back(r.back());
            }
            std::vector<TransformPlan> plans;
            if (fit_transforms.size() == 1) fit_transforms.assign(static_cast<std::size_t>(d), fit_transforms[0]);
            if (static_cast<int>(fit_transforms.size()) != d) fail(ErrorKind::Config, "need one --transform per dimension");
            for (const auto& s : fit_transforms) plans.push_back(parse_plan(s));
            FitOptions opt;
            opt.m = fit_m;
            opt.eta_override = fit_eta;
            opt.lsqr.atol = opt.lsqr.btol = fit_tol;
            for (const auto& u : parse_subsets(fit_subsets, d)) opt.terms.push_back({u, fit_n});
            auto model = fit(Y, f, plans, opt);
            if (fit_cond) model.stats().acond_estimate = condition_number(design_matrix(model, Y, f.size()));
            print_stats(model);
            write_text(fit_out, model.to_json().dump(1) + "\n");
        } else if (*cpred) {
            const auto model = RegressionModel::from_json(read_json(pred_model));
            const auto tab = read_csv(pred_data);
            const std::size_t d = static_cast<std::size_t>(model.dim());
            std::vector<double> Y, truth;
            for (const auto& r : tab.rows) {
                if (r.size() != d && r.size() != d + 1) fail(ErrorKind::Data, "predict: column count does not match model");
                Y.insert(Y.end(), r.begin(), r.begin() + static_cast<long>(d));
                if (r.size() == d + 1) truth.push_back(r.back());
            }
            const auto p = model.predict(Y);
            std::ostringstream o;
            o << "prediction\n";
            for (double v : p) {
                char buf[40];
                std::snprintf(buf, sizeof buf, "%.17g\n", v);
                o << buf;
            }
            write_text(pred_out, o.str());
            if (truth.size() == p.size() && !p.empty()) std::fprintf(stderr, "rmse=%.6g\n", rmse(p, truth));
        } else if (*cconv) {
            auto j = read_json(conv_config);
            if (conv_m) j["m"] = *conv_m;
            if (conv_nmin) j["n_min"] = *conv_nmin;
            if (conv_nmax) j["n_max"] = *conv_nmax;
            if (conv_seeds) j["seeds"] = *conv_seeds;
            if (conv_seed) j["seed"] = *conv_seed;
            const auto cfg = ExperimentConfig::from_json(j);
            const auto res = run_convergence(cfg);
            write_text(conv_out, res.to_csv(cfg.hash()));
            std::fprintf(stderr, "median slope %.4f over n=%d..%d\n", res.median_slope, res.window.first, res.window.second);
        } else if (*ct1) {
            const auto rows = run_table1(t1_m, t1_nmin, t1_nmax);
            nlohmann::json desc = {{"table1", {{"m", t1_m}, {"n_min", t1_nmin}, {"n_max", t1_nmax}}}};
            write_text(t1_out, table1_csv(rows, fnv1a_hex(desc.dump())));
        } else if (*c2s) {
            nlohmann::json j = ts_config.empty() ? nlohmann::json{{"preset", "eight-dim"}} : read_json(ts_config);
            if (ts_samples) j["samples"] = *ts_samples;
            const auto cfg = ExperimentConfig::from_json(j);
            const auto res = run_two_stage(cfg, ts_seed.value_or(cfg.seed));
            auto out = res.to_json();
            out["config_hash"] = cfg.hash();
            out["version"] = kVersion;
            write_text(ts_out, out.dump(1) + "\n");
            if (!ts_gsi.empty()) write_text(ts_gsi, csv_banner(cfg.hash()) + res.stage1.to_csv());
            std::fprintf(stderr, "rmse stage1=%.6g stage2=%.6g\n", res.rmse1, res.rmse2);
        } else if (*cgsi) {
            const auto model = RegressionModel::from_json(read_json(gsi_model));
            const auto rep = gsi(model, gsi_eps);
            if (gsi_format == "json") write_text(gsi_out, rep.to_json().dump(1) + "\n");
            else write_text(gsi_out, csv_banner(fnv1a_hex(model.to_json().dump())) + rep.to_csv());
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.kind() == ErrorKind::Numeric ? 3 : 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
