#include "hwr/sensitivity.hpp"

#include <algorithm>
#include <sstream>

#include "hwr/errors.hpp"

namespace hwr {

namespace {

// out = (G_{j_1} x ... x G_{j_q}) a for one level block, with circulant 1-D factors.
std::vector<double> apply_block_gram(int m, const std::vector<int>& levels, const std::vector<std::size_t>& strides,
                                     std::vector<double> a) {
    std::vector<double> tmp(a.size());
    for (std::size_t p = 0; p < levels.size(); ++p) {
        const auto row = level_gram_row(m, levels[p]);
        const auto P = static_cast<long long>(row.size());
        std::vector<std::pair<long long, double>> taps;
        for (long long k = 0; k < P; ++k)
            if (row[static_cast<std::size_t>(k)] != 0.0) taps.emplace_back(k, row[static_cast<std::size_t>(k)]);
        const std::size_t stride = strides[p];
        std::fill(tmp.begin(), tmp.end(), 0.0);
        for (std::size_t idx = 0; idx < a.size(); ++idx) {
            const auto k = static_cast<long long>((idx / stride) % static_cast<std::size_t>(P));
            const std::size_t base = idx - static_cast<std::size_t>(k) * stride;
            double acc = 0.0;
            for (const auto& [off, g] : taps) {
                const long long kk = (k + off) % P;
                acc += g * a[base + static_cast<std::size_t>(kk) * stride];
            }
            tmp[idx] = acc;
        }
        a.swap(tmp);
    }
    return a;
}

}  // namespace

double term_variance(const RegressionModel& model, const Subset& u) {
    if (u.empty()) fail(ErrorKind::InvalidArgument, "term_variance: the constant term has no variance");
    const IndexSet& idx = model.index_set();
    const TermSlice* term = idx.find_term(u);
    if (!term) fail(ErrorKind::InvalidArgument, "term_variance: unknown term " + subset_label(u));
    const auto& coef = model.coefficients();
    double total = 0.0;
    for (std::size_t bi : term->blocks) {
        const LevelBlock& b = idx.blocks()[bi];
        std::vector<int> levels;
        for (int i : u) levels.push_back(b.j[static_cast<std::size_t>(i)]);
        std::vector<double> a(coef.begin() + static_cast<std::ptrdiff_t>(b.offset),
                              coef.begin() + static_cast<std::ptrdiff_t>(b.offset + b.size));
        auto Ga = apply_block_gram(model.order(), levels, b.strides, a);
        for (std::size_t i = 0; i < a.size(); ++i) total += a[i] * Ga[i];
    }
    return total;
}

SensitivityReport gsi(const RegressionModel& model, double eps) {
    SensitivityReport r;
    r.threshold = eps;
    const IndexSet& idx = model.index_set();
    for (const auto& t : idx.terms()) {
        if (t.u.empty()) {
            r.constant = model.coefficients()[t.offset];
            continue;
        }
        TermShare s;
        s.u = t.u;
        s.variance = term_variance(model, t.u);
        r.total_variance += s.variance;
        r.terms.push_back(s);
    }
    if (!(r.total_variance > 0)) fail(ErrorKind::Numeric, "gsi: total variance is zero (constant model)");
    for (auto& s : r.terms) s.gsi = s.variance / r.total_variance;
    r.active_set = active_set(r, eps);
    for (auto& s : r.terms) s.active = std::find(r.active_set.begin(), r.active_set.end(), s.u) != r.active_set.end();
    return r;
}

int effective_dimension(const SensitivityReport& report, double coverage) {
    if (!(coverage > 0 && coverage <= 1)) fail(ErrorKind::InvalidArgument, "coverage must lie in (0, 1]");
    std::size_t top = 0;
    for (const auto& t : report.terms) top = std::max(top, t.u.size());
    for (std::size_t nu = 1; nu <= top; ++nu) {
        double acc = 0.0;
        for (const auto& t : report.terms)
            if (t.u.size() <= nu) acc += t.variance;
        // relative slack for rounding when coverage = 1
        if (acc >= coverage * report.total_variance * (1.0 - 1e-12)) return static_cast<int>(nu);
    }
    return static_cast<int>(top);
}

std::vector<Subset> active_set(const SensitivityReport& report, double eps) {
    std::vector<Subset> U{Subset{}};
    for (const auto& t : report.terms)
        if (t.gsi > eps) U.push_back(t.u);
    sort_subsets(U);
    return U;
}

const TermShare* SensitivityReport::find(const Subset& u) const {
    for (const auto& t : terms)
        if (t.u == u) return &t;
    return nullptr;
}

nlohmann::json SensitivityReport::to_json() const {
    nlohmann::json j;
    j["total_variance"] = total_variance;
    j["constant"] = constant;
    j["threshold"] = threshold;
    j["terms"] = nlohmann::json::array();
    for (const auto& t : terms)
        j["terms"].push_back({{"u", subset_label(t.u)}, {"variance", t.variance}, {"gsi", t.gsi}, {"active", t.active}});
    j["active_set"] = nlohmann::json::array();
    for (const auto& u : active_set) j["active_set"].push_back(subset_label(u));
    return j;
}

std::string SensitivityReport::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "u,variance,gsi,active\n";
    for (const auto& t : terms) os << '"' << subset_label(t.u) << "\"," << t.variance << ',' << t.gsi << ',' << (t.active ? 1 : 0) << '\n';
    return os.str();
}

}  // namespace hwr
