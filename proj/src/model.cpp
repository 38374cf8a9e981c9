#include <cmath>
#include <map>

#include "hwr/errors.hpp"
#include "hwr/regression.hpp"

namespace hwr {

TransformPlan TransformPlan::known(DensityPtr d) {
    TransformPlan p;
    p.kind = Kind::Known;
    p.density = std::move(d);
    if (p.density) p.domain = p.density->domain();
    return p;
}

TransformPlan TransformPlan::kde(DomainKind domain, BandwidthRule rule) {
    TransformPlan p;
    p.kind = Kind::Kde;
    p.domain = domain;
    p.bandwidth = rule;
    return p;
}

// {"name": "normal"} or {"kde": "dpi", "domain": "real"}
TransformPlan TransformPlan::from_json(const nlohmann::json& j) {
    if (j.is_object() && j.contains("kde")) {
        DomainKind dom = j.contains("domain") ? parse_domain(j["domain"].get<std::string>()) : DomainKind::RealLine;
        return kde(dom, BandwidthRule::parse(j["kde"].get<std::string>()));
    }
    return known(make_density(j));
}

nlohmann::json TransformPlan::to_json() const {
    if (kind == Kind::Kde) return {{"kde", bandwidth.str()}, {"domain", to_string(domain)}};
    return density->to_json();
}

RegressionModel::RegressionModel(int m, IndexSet idx, std::vector<TransformPtr> transforms, std::vector<double> term_eta,
                                 std::vector<double> coefficients)
    : m_(m),
      index_(std::move(idx)),
      transforms_(std::move(transforms)),
      term_eta_(std::move(term_eta)),
      coef_(std::move(coefficients)) {
    if (static_cast<int>(transforms_.size()) != index_.dim())
        fail(ErrorKind::InvalidArgument, "need one transform per dimension");
    if (term_eta_.size() != index_.terms().size()) fail(ErrorKind::InvalidArgument, "need one eta per term");
    if (coef_.size() != index_.size()) fail(ErrorKind::InvalidArgument, "coefficient vector has wrong length");
    for (double c : coef_)
        if (!std::isfinite(c)) fail(ErrorKind::Numeric, "non-finite coefficient");
}

RegressionModel::Coordinates RegressionModel::transform_points(const std::vector<double>& Y, std::size_t M) const {
    const auto d = static_cast<std::size_t>(dim());
    if (Y.size() != M * d) fail(ErrorKind::InvalidArgument, "sample matrix must be M x d");
    Coordinates out;
    out.view.M = M;
    out.view.d = d;
    std::map<std::pair<std::size_t, double>, std::vector<double>> columns;
    std::map<std::vector<double>, std::size_t> by_signature;
    const auto& terms = index_.terms();
    std::vector<std::size_t> slot(terms.size());
    for (std::size_t t = 0; t < terms.size(); ++t) {
        std::vector<double> sig(d, 0.0);
        std::vector<TransformPtr> T(d);
        for (std::size_t i = 0; i < d; ++i) {
            T[i] = transforms_[i]->with_eta(term_eta_[t]);
            sig[i] = T[i]->eta();
        }
        auto found = by_signature.find(sig);
        if (found == by_signature.end()) {
            std::vector<double> X(M * d);
            for (std::size_t i = 0; i < d; ++i) {
                auto key = std::make_pair(i, sig[i]);
                auto col = columns.find(key);
                if (col == columns.end()) {
                    std::vector<double> c(M);
                    T[i]->forward_batch(Y.data() + i, M, c.data(), d, 1);
                    col = columns.emplace(key, std::move(c)).first;
                }
                for (std::size_t s = 0; s < M; ++s) X[s * d + i] = col->second[s];
            }
            out.storage.push_back(std::move(X));
            found = by_signature.emplace(sig, out.storage.size() - 1).first;
        }
        slot[t] = found->second;
    }
    // take pointers only after storage stops growing
    for (std::size_t t = 0; t < terms.size(); ++t) out.view.per_term.push_back(out.storage[slot[t]].data());
    return out;
}

std::vector<double> RegressionModel::predict(const std::vector<double>& Y) const {
    const auto d = static_cast<std::size_t>(dim());
    if (d == 0 || Y.size() % d) fail(ErrorKind::InvalidArgument, "prediction input must be M x d");
    const std::size_t M = Y.size() / d;
    auto coords = transform_points(Y, M);
    std::vector<double> out(M);
    for (std::size_t s = 0; s < M; ++s) {
        double acc = 0.0;
        for_each_basis_value(
            index_, m_, [&](std::size_t t) { return coords.view.per_term[t] + s * d; },
            [&](std::size_t c, double v) { acc += coef_[c] * v; });
        out[s] = acc;
    }
    return out;
}

double RegressionModel::predict(const double* y) const {
    std::vector<double> Y(y, y + dim());
    return predict(Y)[0];
}

double RegressionModel::evaluate_terms_torus(const double* x, const std::vector<std::size_t>& keep) const {
    std::vector<bool> on(index_.terms().size(), false);
    for (auto t : keep) on.at(t) = true;
    std::vector<std::size_t> term_of_col(index_.size());
    for (std::size_t t = 0; t < index_.terms().size(); ++t) {
        const auto& ts = index_.terms()[t];
        for (std::size_t c = ts.offset; c < ts.offset + ts.size; ++c) term_of_col[c] = t;
    }
    double acc = 0.0;
    for_each_basis_value(
        index_, m_, [&](std::size_t) { return x; },
        [&](std::size_t c, double v) {
            if (on[term_of_col[c]]) acc += coef_[c] * v;
        });
    return acc;
}

nlohmann::json RegressionModel::to_json() const {
    nlohmann::json j;
    j["format"] = "hwr-model";
    j["version"] = 1;
    j["m"] = m_;
    j["index_set"] = index_.to_json();
    j["coefficients"] = coef_;
    j["term_eta"] = term_eta_;
    j["transforms"] = nlohmann::json::array();
    for (const auto& t : transforms_) j["transforms"].push_back(t->to_json());
    j["solver"] = {{"iterations", stats_.iterations},
                   {"residual_norm", stats_.residual_norm},
                   {"normal_residual_norm", stats_.normal_residual_norm},
                   {"acond_estimate", stats_.acond_estimate},
                   {"converged", stats_.converged},
                   {"stop_reason", stats_.stop_reason}};
    j["warnings"] = warnings_;
    return j;
}

TransformPtr transform_from_json(const nlohmann::json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "density") return std::make_shared<DensityTransform>(make_density(j.at("density")), j.value("eta", 0.0));
    if (type == "kde") return EstimatedTransform::from_json(j);
    fail(ErrorKind::Data, "unknown transform type '" + type + "'");
}

RegressionModel RegressionModel::from_json(const nlohmann::json& j) {
    try {
        if (j.value("format", std::string()) != "hwr-model") fail(ErrorKind::Data, "not an hwr model file");
        std::vector<TransformPtr> T;
        for (const auto& t : j.at("transforms")) T.push_back(transform_from_json(t));
        RegressionModel model(j.at("m").get<int>(), IndexSet::from_json(j.at("index_set")), std::move(T),
                              j.at("term_eta").get<std::vector<double>>(), j.at("coefficients").get<std::vector<double>>());
        if (j.contains("solver")) {
            const auto& s = j["solver"];
            model.stats_.iterations = s.value("iterations", std::size_t{0});
            model.stats_.residual_norm = s.value("residual_norm", 0.0);
            model.stats_.normal_residual_norm = s.value("normal_residual_norm", 0.0);
            model.stats_.acond_estimate = s.value("acond_estimate", 0.0);
            model.stats_.converged = s.value("converged", false);
            model.stats_.stop_reason = s.value("stop_reason", std::string());
        }
        if (j.contains("warnings")) model.warnings_ = j["warnings"].get<std::vector<std::string>>();
        return model;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Data, std::string("malformed model JSON: ") + e.what());
    }
}

std::vector<TransformPtr> build_transforms(const std::vector<TransformPlan>& plans, const std::vector<double>& Y,
                                           std::size_t M, std::vector<std::string>* warnings) {
    const std::size_t d = plans.size();
    if (Y.size() != M * d) fail(ErrorKind::InvalidArgument, "sample matrix must be M x d");
    std::vector<TransformPtr> out;
    for (std::size_t i = 0; i < d; ++i) {
        const auto& p = plans[i];
        if (p.kind == TransformPlan::Kind::Known) {
            if (!p.density) fail(ErrorKind::Config, "known-density plan without density");
            out.push_back(make_transform(p.density));
        } else {
            std::vector<double> col(M);
            for (std::size_t s = 0; s < M; ++s) col[s] = Y[s * d + i];
            auto e = estimate_transform(col, p.domain, p.bandwidth);
            if (warnings)
                for (const auto& w : e->warnings()) warnings->push_back("dim " + std::to_string(i + 1) + ": " + w);
            out.push_back(e);
        }
    }
    return out;
}

RegressionModel fit(const std::vector<double>& Y, const std::vector<double>& f, const std::vector<TransformPtr>& transforms,
                    const FitOptions& opt) {
    const std::size_t d = transforms.size();
    const std::size_t M = f.size();
    if (d == 0) fail(ErrorKind::InvalidArgument, "fit: no dimensions");
    if (Y.size() != M * d) fail(ErrorKind::InvalidArgument, "fit: |Y| and |f| disagree");
    for (double v : f)
        if (!std::isfinite(v)) fail(ErrorKind::Data, "fit: non-finite function value");
    IndexSet idx(static_cast<int>(d), opt.terms);
    std::vector<double> eta;
    for (const auto& t : idx.terms()) {
        if (opt.eta_override) eta.push_back(*opt.eta_override);
        else eta.push_back(t.u.empty() ? 0.0 : default_eta(opt.m, t.level, static_cast<int>(t.u.size())));
    }
    RegressionModel model(opt.m, idx, transforms, eta, std::vector<double>(idx.size(), 0.0));
    auto coords = model.transform_points(Y, M);
    const SparseDesignMatrix A = assemble(coords.view, model.index_set(), opt.m);

    const double N = static_cast<double>(idx.size());
    const double need = N > 1 ? N * std::log(N) / std::log(opt.oversampling_log_base) : 1.0;
    if (static_cast<double>(M) < need)
        model.warnings().push_back("oversampling: M=" + std::to_string(M) + " < N log N=" + std::to_string(need));

    auto res = lsqr(A, f, opt.lsqr);
    RegressionModel out(opt.m, std::move(idx), transforms, std::move(eta), std::move(res.x));
    out.warnings() = model.warnings();
    out.stats().iterations = res.iterations;
    out.stats().residual_norm = res.residual_norm;
    out.stats().normal_residual_norm = res.normal_residual_norm;
    out.stats().acond_estimate = res.acond;
    out.stats().converged = res.converged;
    out.stats().stop_reason = res.stop_reason();
    if (!res.converged) out.warnings().push_back("lsqr: " + res.stop_reason());
    return out;
}

RegressionModel fit(const std::vector<double>& Y, const std::vector<double>& f, const std::vector<TransformPlan>& plans,
                    const FitOptions& opt) {
    std::vector<std::string> warnings;
    auto T = build_transforms(plans, Y, f.size(), &warnings);
    auto model = fit(Y, f, T, opt);
    for (auto& w : warnings) model.warnings().push_back(w);
    return model;
}

}  // namespace hwr
