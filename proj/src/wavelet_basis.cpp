#include "hwr/wavelet_basis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "hwr/errors.hpp"
#include "hwr/spline.hpp"

namespace hwr {

std::string subset_label(const Subset& u) {
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < u.size(); ++i) os << (i ? "," : "") << u[i] + 1;
    os << '}';
    return os.str();
}

Subset parse_subset_label(const std::string& s) {
    Subset u;
    std::string body;
    for (char c : s)
        if (c != '{' && c != '}' && c != ' ') body += c;
    std::stringstream ss(body);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        int v = 0;
        const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || end != tok.data() + tok.size())
            fail(ErrorKind::InvalidArgument, "bad subset label '" + s + "'");
        if (v < 1) fail(ErrorKind::InvalidArgument, "subset labels are 1-based: " + s);
        u.push_back(v - 1);
    }
    std::sort(u.begin(), u.end());
    if (std::adjacent_find(u.begin(), u.end()) != u.end())
        fail(ErrorKind::InvalidArgument, "repeated index in subset label '" + s + "'");
    return u;
}

Subset anova_class(const std::vector<int>& j) {
    Subset u;
    for (std::size_t i = 0; i < j.size(); ++i)
        if (j[i] >= 0) u.push_back(static_cast<int>(i));
    return u;
}

void sort_subsets(std::vector<Subset>& U) {
    std::sort(U.begin(), U.end(), [](const Subset& a, const Subset& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
    U.erase(std::unique(U.begin(), U.end()), U.end());
}

std::vector<Subset> subsets_up_to(int d, int nu) {
    std::vector<Subset> out;
    for (unsigned long mask = 0; mask < (1ul << d); ++mask) {
        Subset u;
        for (int i = 0; i < d; ++i)
            if (mask & (1ul << i)) u.push_back(i);
        if (static_cast<int>(u.size()) <= nu) out.push_back(u);
    }
    sort_subsets(out);
    return out;
}

namespace {

// level vectors over |u| coordinates with entries >= 0 and sum <= budget, lexicographic
void level_vectors(std::size_t len, int budget, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (cur.size() == len) {
        out.push_back(cur);
        return;
    }
    for (int l = 0; l <= budget; ++l) {
        cur.push_back(l);
        level_vectors(len, budget - l, cur, out);
        cur.pop_back();
    }
}

}  // namespace

IndexSet::IndexSet(int d, std::vector<TermSpec> terms) : d_(d) {
    if (d < 1) fail(ErrorKind::InvalidArgument, "dimension must be >= 1");
    for (auto& t : terms) {
        std::sort(t.u.begin(), t.u.end());
        for (std::size_t i = 0; i < t.u.size(); ++i) {
            if (t.u[i] < 0 || t.u[i] >= d)
                fail(ErrorKind::InvalidArgument, "invalid subset " + subset_label(t.u) + " for d=" + std::to_string(d));
            if (i && t.u[i] == t.u[i - 1]) fail(ErrorKind::InvalidArgument, "repeated variable in subset");
        }
        if (t.level < 0) fail(ErrorKind::InvalidArgument, "level must be >= 0");
    }
    std::sort(terms.begin(), terms.end(), [](const TermSpec& a, const TermSpec& b) {
        if (a.u.size() != b.u.size()) return a.u.size() < b.u.size();
        return a.u < b.u;
    });
    for (std::size_t i = 1; i < terms.size(); ++i)
        if (terms[i].u == terms[i - 1].u) fail(ErrorKind::InvalidArgument, "duplicate subset " + subset_label(terms[i].u));
    if (terms.empty() || !terms.front().u.empty())
        fail(ErrorKind::InvalidArgument, "the subset collection must contain the empty set");

    std::size_t offset = 0;
    for (const auto& t : terms) {
        TermSlice slice{t.u, t.level, offset, 0, {}};
        n_ = std::max(n_, t.u.empty() ? 0 : t.level);
        std::vector<std::vector<int>> levels;
        std::vector<int> cur;
        level_vectors(t.u.size(), t.level, cur, levels);
        for (const auto& ju : levels) {
            LevelBlock b;
            b.term = terms_.size();
            b.j.assign(static_cast<std::size_t>(d), -1);
            std::size_t sz = 1;
            for (std::size_t p = 0; p < t.u.size(); ++p) {
                b.j[static_cast<std::size_t>(t.u[p])] = ju[p];
                sz <<= ju[p];
            }
            b.offset = offset;
            b.size = sz;
            b.strides.assign(t.u.size(), 1);
            for (std::size_t p = t.u.size(); p-- > 1;) b.strides[p - 1] = b.strides[p] << ju[p];
            block_of_[b.j] = blocks_.size();
            slice.blocks.push_back(blocks_.size());
            blocks_.push_back(std::move(b));
            offset += sz;
        }
        slice.size = offset - slice.offset;
        terms_.push_back(std::move(slice));
    }
    total_ = offset;
}

const TermSlice* IndexSet::find_term(const Subset& u) const {
    for (const auto& t : terms_)
        if (t.u == u) return &t;
    return nullptr;
}

WaveletIndex IndexSet::entry(std::size_t column) const {
    if (column >= total_) fail(ErrorKind::Range, "column out of range");
    auto it = std::upper_bound(blocks_.begin(), blocks_.end(), column,
                               [](std::size_t c, const LevelBlock& b) { return c < b.offset; });
    const LevelBlock& b = *(it - 1);
    const Subset& u = terms_[b.term].u;
    WaveletIndex w{b.j, std::vector<long long>(static_cast<std::size_t>(d_), 0)};
    std::size_t r = column - b.offset;
    for (std::size_t p = 0; p < u.size(); ++p) {
        w.k[static_cast<std::size_t>(u[p])] = static_cast<long long>(r / b.strides[p]);
        r %= b.strides[p];
    }
    return w;
}

std::vector<WaveletIndex> IndexSet::entries() const {
    std::vector<WaveletIndex> out;
    out.reserve(total_);
    for (std::size_t c = 0; c < total_; ++c) out.push_back(entry(c));
    return out;
}

std::optional<std::size_t> IndexSet::column_of(const WaveletIndex& idx) const {
    auto it = block_of_.find(idx.j);
    if (it == block_of_.end()) return std::nullopt;
    const LevelBlock& b = blocks_[it->second];
    const Subset& u = terms_[b.term].u;
    std::size_t col = b.offset;
    for (std::size_t i = 0; i < static_cast<std::size_t>(d_); ++i)
        if (idx.j[i] < 0 && idx.k[i] != 0) return std::nullopt;
    for (std::size_t p = 0; p < u.size(); ++p) {
        long long k = idx.k[static_cast<std::size_t>(u[p])];
        if (k < 0 || k >= (1ll << b.j[static_cast<std::size_t>(u[p])])) return std::nullopt;
        col += static_cast<std::size_t>(k) * b.strides[p];
    }
    return col;
}

std::vector<Subset> IndexSet::subsets() const {
    std::vector<Subset> out;
    for (const auto& t : terms_) out.push_back(t.u);
    return out;
}

nlohmann::json IndexSet::to_json() const {
    nlohmann::json j;
    j["d"] = d_;
    j["n"] = n_;
    j["N"] = total_;
    j["terms"] = nlohmann::json::array();
    for (const auto& t : terms_)
        j["terms"].push_back({{"u", subset_label(t.u)}, {"level", t.level}, {"offset", t.offset}, {"size", t.size}});
    return j;
}

IndexSet IndexSet::from_json(const nlohmann::json& j) {
    std::vector<TermSpec> terms;
    for (const auto& t : j.at("terms")) terms.push_back({parse_subset_label(t.at("u").get<std::string>()), t.at("level").get<int>()});
    IndexSet s(j.at("d").get<int>(), std::move(terms));
    if (j.contains("N") && j["N"].get<std::size_t>() != s.size())
        fail(ErrorKind::Data, "index set JSON: N does not match the rebuilt set");
    return s;
}

IndexSet build_index_set(int d, int n, const std::vector<Subset>& U) {
    if (n < 0) fail(ErrorKind::InvalidArgument, "n must be >= 0");
    if (U.empty()) fail(ErrorKind::InvalidArgument, "U must be nonempty");
    std::vector<TermSpec> terms;
    for (const auto& u : U) terms.push_back({u, n});
    return IndexSet(d, std::move(terms));
}

IndexSet build_index_set(int d, const std::vector<TermSpec>& terms) { return IndexSet(d, terms); }

int active_translates(int m, int j, double x, Translate* out) {
    if (j < 0) {
        out[0] = {0, 1.0};
        return 1;
    }
    const WaveletTable& psi = wavelet_table(m);
    const double scale = std::ldexp(1.0, j);
    const long long period = 1ll << j;
    const double amp = std::sqrt(scale);
    const double z = scale * wrap_torus(x);
    const long long fz = static_cast<long long>(std::floor(z));
    int count = 0;
    for (long long p = fz; p >= fz - (2 * m - 2); --p) {
        const double v = psi(z - static_cast<double>(p));
        if (v == 0.0) continue;
        long long k = p % period;
        if (k < 0) k += period;
        int slot = 0;
        while (slot < count && out[slot].k != k) ++slot;
        if (slot == count) out[count++] = {k, amp * v};
        else out[slot].value += amp * v;
    }
    int w = 0;
    for (int i = 0; i < count; ++i)
        if (out[i].value != 0.0) out[w++] = out[i];
    return w;
}

std::vector<long long> active_translates(int m, int j, double x) {
    std::vector<Translate> buf(static_cast<std::size_t>(2 * m));
    int c = active_translates(m, j, x, buf.data());
    std::vector<long long> ks;
    for (int i = 0; i < c; ++i) ks.push_back(buf[static_cast<std::size_t>(i)].k);
    std::sort(ks.begin(), ks.end());
    return ks;
}

double eval_periodic(int m, int j, long long k, double x) {
    if (j < 0) return 1.0;
    std::vector<Translate> buf(static_cast<std::size_t>(2 * m));
    int c = active_translates(m, j, x, buf.data());
    for (int i = 0; i < c; ++i)
        if (buf[static_cast<std::size_t>(i)].k == k) return buf[static_cast<std::size_t>(i)].value;
    return 0.0;
}

double eval_basis(int m, const WaveletIndex& idx, const double* x) {
    double v = 1.0;
    for (std::size_t i = 0; i < idx.j.size(); ++i) {
        if (idx.j[i] < 0) continue;
        v *= eval_periodic(m, idx.j[i], idx.k[i], x[i]);
        if (v == 0.0) break;
    }
    return v;
}

double eval_basis(int m, const WaveletIndex& idx, const std::vector<double>& x) {
    if (x.size() != idx.j.size()) fail(ErrorKind::InvalidArgument, "point dimension mismatch");
    return eval_basis(m, idx, x.data());
}

}  // namespace hwr
