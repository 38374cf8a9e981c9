#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "hwr/errors.hpp"
#include "hwr/experiment.hpp"

namespace hwr {

namespace {

std::vector<nlohmann::json> per_dim(const nlohmann::json& v, int dim, const char* what) {
    std::vector<nlohmann::json> out;
    if (v.is_array()) {
        for (const auto& e : v) out.push_back(e);
        if (static_cast<int>(out.size()) != dim)
            fail(ErrorKind::Config, std::string(what) + ": expected " + std::to_string(dim) + " entries");
    } else {
        out.assign(static_cast<std::size_t>(dim), v);
    }
    return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    static const std::set<std::string> known{"function", "dim",          "densities",   "transforms",     "m",
                                             "n_min",    "n_max",        "slope_window", "subsets",       "seed",
                                             "seeds",    "oversampling", "test_multiplier", "samples",    "eps",
                                             "stage1_level", "stage1_order", "stage2_levels", "eta",      "lsqr_tol",
                                             "condition", "preset"};
    if (!j.is_object()) fail(ErrorKind::Config, "config must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key())) fail(ErrorKind::Config, "unknown config key '" + it.key() + "'");
    try {
        ExperimentConfig c = j.value("preset", std::string()) == "eight-dim" ? eight_dim_default() : ExperimentConfig{};
        if (j.contains("function")) c.function = j["function"].get<std::string>();
        if (j.contains("dim")) c.dim = j["dim"].get<int>();
        else if (c.function == "f8") c.dim = 8;
        if (c.dim < 1) fail(ErrorKind::Config, "dim must be >= 1");
        if (j.contains("densities")) c.densities = per_dim(j["densities"], c.dim, "densities");
        else if (static_cast<int>(c.densities.size()) != c.dim) c.densities = per_dim("normal", c.dim, "densities");
        if (j.contains("transforms")) c.transforms = per_dim(j["transforms"], c.dim, "transforms");
        else if (static_cast<int>(c.transforms.size()) != c.dim) c.transforms = per_dim("known", c.dim, "transforms");
        c.m = j.value("m", c.m);
        c.n_min = j.value("n_min", c.n_min);
        c.n_max = j.value("n_max", c.n_max);
        if (j.contains("slope_window")) {
            auto w = j["slope_window"].get<std::vector<int>>();
            if (w.size() != 2) fail(ErrorKind::Config, "slope_window needs [lo, hi]");
            c.slope_window = std::make_pair(w[0], w[1]);
        }
        if (j.contains("subsets")) c.subsets = j["subsets"];
        c.seed = j.value("seed", c.seed);
        c.seeds = j.value("seeds", c.seeds);
        c.oversampling = j.value("oversampling", c.oversampling);
        c.test_multiplier = j.value("test_multiplier", c.test_multiplier);
        if (j.contains("samples")) c.samples = j["samples"].get<std::size_t>();
        c.eps = j.value("eps", c.eps);
        c.stage1_level = j.value("stage1_level", c.stage1_level);
        c.stage1_order = j.value("stage1_order", c.stage1_order);
        if (j.contains("stage2_levels")) c.stage2_levels = j["stage2_levels"].get<std::vector<int>>();
        if (j.contains("eta")) c.eta = j["eta"].get<double>();
        c.lsqr_tol = j.value("lsqr_tol", c.lsqr_tol);
        c.condition = j.value("condition", c.condition);
        c.validate();
        return c;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Config, std::string("config: ") + e.what());
    }
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Config, "cannot open config file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Config, "config " + path + ": " + e.what());
    }
    return from_json(j);
}

ExperimentConfig ExperimentConfig::eight_dim_default() {
    ExperimentConfig c;
    c.function = "f8";
    c.dim = 8;
    c.densities = {"normal", "laplace", "cauchy", "mixture", "exponential", "uniform", {{"name", "beta"}, {"alpha", 0.5}},
                   "uniform"};
    for (int i = 0; i < 5; ++i) c.transforms.push_back({{"kde", "dpi"}});
    for (int i = 0; i < 3; ++i) c.transforms.push_back({{"kde", "rot"}});
    c.m = 2;
    c.samples = 1000;
    c.stage1_level = 2;
    c.stage1_order = 2;
    c.stage2_levels = {0, 5, 3};
    c.eps = 0.03;
    c.seeds = 5;
    return c;
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["function"] = function;
    j["dim"] = dim;
    j["densities"] = densities;
    j["transforms"] = transforms;
    j["m"] = m;
    j["n_min"] = n_min;
    j["n_max"] = n_max;
    if (slope_window) j["slope_window"] = {slope_window->first, slope_window->second};
    j["subsets"] = subsets;
    j["seed"] = seed;
    j["seeds"] = seeds;
    j["oversampling"] = oversampling;
    j["test_multiplier"] = test_multiplier;
    if (samples) j["samples"] = *samples;
    j["eps"] = eps;
    j["stage1_level"] = stage1_level;
    j["stage1_order"] = stage1_order;
    j["stage2_levels"] = stage2_levels;
    if (eta) j["eta"] = *eta;
    j["lsqr_tol"] = lsqr_tol;
    j["condition"] = condition;
    return j;
}

std::string fnv1a_hex(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string ExperimentConfig::hash() const { return fnv1a_hex(to_json().dump()); }

void ExperimentConfig::validate() const {
    const auto& tf = test_function(function);
    if (tf.dim && tf.dim != dim)
        fail(ErrorKind::Config, "function " + function + " needs dim=" + std::to_string(tf.dim));
    if (static_cast<int>(densities.size()) != dim || static_cast<int>(transforms.size()) != dim)
        fail(ErrorKind::Config, "densities and transforms need one entry per dimension");
    if (m < 1) fail(ErrorKind::Config, "m must be >= 1");
    if (n_min < 0 || n_max < n_min) fail(ErrorKind::Config, "need 0 <= n_min <= n_max");
    if (seeds < 1) fail(ErrorKind::Config, "seeds must be >= 1");
    if (!(oversampling > 0) || !(test_multiplier > 0)) fail(ErrorKind::Config, "sample multipliers must be positive");
    if (!(eps >= 0 && eps <= 1)) fail(ErrorKind::Config, "eps must lie in [0,1]");
    if (!(lsqr_tol > 0)) fail(ErrorKind::Config, "lsqr_tol must be positive");
    if (eta && !(*eta >= 0 && *eta < 1)) fail(ErrorKind::Config, "eta must lie in [0,1)");
    for (int l : stage2_levels)
        if (l < 0) fail(ErrorKind::Config, "stage2 levels must be >= 0");
    (void)plans();
    (void)subset_list();
}

std::vector<DensityPtr> ExperimentConfig::sampling_densities() const {
    std::vector<DensityPtr> out;
    for (const auto& d : densities) out.push_back(make_density(d));
    return out;
}

std::vector<TransformPlan> ExperimentConfig::plans() const {
    auto dens = sampling_densities();
    std::vector<TransformPlan> out;
    for (std::size_t i = 0; i < transforms.size(); ++i) {
        const auto& t = transforms[i];
        if (t.is_string() && t.get<std::string>() == "known") {
            out.push_back(TransformPlan::known(dens[i]));
        } else if (t.is_object() && t.contains("kde")) {
            DomainKind dom = t.contains("domain") ? parse_domain(t["domain"].get<std::string>()) : dens[i]->domain();
            out.push_back(TransformPlan::kde(dom, BandwidthRule::parse(t["kde"].get<std::string>())));
        } else {
            fail(ErrorKind::Config, "transform entries must be \"known\" or {\"kde\": rule}");
        }
    }
    return out;
}

std::vector<Subset> ExperimentConfig::subset_list() const {
    if (subsets.is_string()) {
        if (subsets.get<std::string>() != "full") fail(ErrorKind::Config, "subsets must be \"full\", an order, or a list");
        return subsets_up_to(dim, dim);
    }
    if (subsets.is_number_integer()) {
        int nu = subsets.get<int>();
        if (nu < 0) fail(ErrorKind::Config, "subset order must be >= 0");
        return subsets_up_to(dim, std::min(nu, dim));
    }
    if (subsets.is_array()) {
        std::vector<Subset> U{Subset{}};
        for (const auto& s : subsets) {
            Subset u = parse_subset_label(s.get<std::string>());
            for (int i : u)
                if (i >= dim) fail(ErrorKind::Config, "subset " + s.get<std::string>() + " exceeds dim");
            U.push_back(u);
        }
        sort_subsets(U);
        return U;
    }
    fail(ErrorKind::Config, "bad subsets entry");
}

std::string csv_banner(const std::string& config_hash) {
    return std::string("# hwr ") + kVersion + " config=" + config_hash + "\n";
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Config, "cannot open " + path);
    CsvTable t;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        std::vector<double> row;
        bool numeric = true;
        for (const auto& c : cells) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(c, &used));
                if (c.find_first_not_of(" \t", used) != std::string::npos) numeric = false;
            } catch (const std::exception&) {
                numeric = false;
            }
        }
        if (!numeric) {
            if (t.header.empty() && t.rows.empty()) {
                t.header = cells;
                continue;
            }
            fail(ErrorKind::Data, path + ":" + std::to_string(lineno) + ": non-numeric value");
        }
        if (!t.rows.empty() && row.size() != t.rows.front().size())
            fail(ErrorKind::Data, path + ":" + std::to_string(lineno) + ": ragged row");
        t.rows.push_back(std::move(row));
    }
    return t;
}

void write_text(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::fwrite(content.data(), 1, content.size(), stdout);
        return;
    }
    std::ofstream out(path);
    if (!out) fail(ErrorKind::Config, "cannot write " + path);
    out << content;
}

}  // namespace hwr
