#include "hwr/piecewise.hpp"

#include <algorithm>
#include <sstream>

#include "hwr/errors.hpp"

namespace hwr {

namespace poly {

Rational eval(const PiecewisePolynomial::Coeffs& c, const Rational& t) {
    Rational acc = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
    return acc;
}

PiecewisePolynomial::Coeffs shift(const PiecewisePolynomial::Coeffs& c, const Rational& delta) {
    // p(t) = sum c_l (t - a)^l, with (t - a) = (t - b) + delta
    const std::size_t n = c.size();
    PiecewisePolynomial::Coeffs d(c);
    if (delta == 0) return d;
    // repeated synthetic division (Taylor shift), O(n^2)
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = n - 1; k > i; --k) d[k - 1] += d[k] * delta;
    return d;
}

PiecewisePolynomial::Coeffs multiply(const PiecewisePolynomial::Coeffs& a,
                                     const PiecewisePolynomial::Coeffs& b) {
    if (a.empty() || b.empty()) return {};
    PiecewisePolynomial::Coeffs r(a.size() + b.size() - 1, Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    }
    return r;
}

static Rational derivative_value(const PiecewisePolynomial::Coeffs& c, const Rational& t, int r) {
    Rational acc = 0;
    for (std::size_t l = c.size(); l-- > static_cast<std::size_t>(r);) {
        Rational f = 1;
        for (int q = 0; q < r; ++q) f *= Rational(static_cast<long long>(l) - q);
        acc = acc * t + c[l] * f;
    }
    return acc;
}

}  // namespace poly

PiecewisePolynomial::PiecewisePolynomial(std::vector<Rational> knots, std::vector<Coeffs> pieces,
                                         Rational right_tail)
    : knots_(std::move(knots)), pieces_(std::move(pieces)), tail_(std::move(right_tail)) {
    if (knots_.empty()) {
        if (!pieces_.empty() || tail_ != 0)
            fail(ErrorKind::InvalidArgument, "piecewise polynomial: pieces without knots");
    } else {
        if (pieces_.size() + 1 != knots_.size())
            fail(ErrorKind::InvalidArgument, "piecewise polynomial: need one piece per knot interval");
        for (std::size_t i = 1; i < knots_.size(); ++i)
            if (!(knots_[i - 1] < knots_[i]))
                fail(ErrorKind::InvalidArgument, "piecewise polynomial: knots must increase strictly");
    }
    build_cache();
}

void PiecewisePolynomial::build_cache() {
    knots_d_.clear();
    pieces_d_.clear();
    for (const auto& k : knots_) knots_d_.push_back(to_double(k));
    for (const auto& p : pieces_) {
        std::vector<double> c;
        for (const auto& v : p) c.push_back(to_double(v));
        pieces_d_.push_back(std::move(c));
    }
    tail_d_ = to_double(tail_);
}

int PiecewisePolynomial::degree() const {
    int d = 0;
    for (const auto& p : pieces_)
        for (std::size_t l = 0; l < p.size(); ++l)
            if (p[l] != 0) d = std::max(d, static_cast<int>(l));
    return d;
}

Rational PiecewisePolynomial::support_lo() const { return knots_.empty() ? Rational(0) : knots_.front(); }
Rational PiecewisePolynomial::support_hi() const { return knots_.empty() ? Rational(0) : knots_.back(); }

std::ptrdiff_t PiecewisePolynomial::locate(const Rational& x) const {
    if (knots_.empty() || x < knots_.front()) return -1;
    const auto P = static_cast<std::ptrdiff_t>(pieces_.size());
    if (x > knots_.back()) return P;
    if (x == knots_.back()) return P - 1;
    auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
    return static_cast<std::ptrdiff_t>(it - knots_.begin()) - 1;
}

std::ptrdiff_t PiecewisePolynomial::locate(double x) const {
    if (knots_d_.empty() || x < knots_d_.front()) return -1;
    const auto P = static_cast<std::ptrdiff_t>(pieces_d_.size());
    if (x > knots_d_.back()) return P;
    if (x == knots_d_.back()) return P - 1;
    auto it = std::upper_bound(knots_d_.begin(), knots_d_.end(), x);
    return static_cast<std::ptrdiff_t>(it - knots_d_.begin()) - 1;
}

Rational PiecewisePolynomial::eval_exact(const Rational& x) const {
    auto i = locate(x);
    if (i < 0) return 0;
    if (i >= static_cast<std::ptrdiff_t>(pieces_.size())) return tail_;
    return poly::eval(pieces_[i], x - knots_[i]);
}

double PiecewisePolynomial::operator()(double x) const {
    auto i = locate(x);
    if (i < 0) return 0.0;
    if (i >= static_cast<std::ptrdiff_t>(pieces_d_.size())) return tail_d_;
    const auto& c = pieces_d_[i];
    const double t = x - knots_d_[i];
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
    return acc;
}

double PiecewisePolynomial::derivative_at(double x, int r) const {
    auto i = locate(x);
    if (i < 0) return 0.0;
    if (i >= static_cast<std::ptrdiff_t>(pieces_d_.size())) return r == 0 ? tail_d_ : 0.0;
    const auto& c = pieces_d_[i];
    const double t = x - knots_d_[i];
    double acc = 0.0;
    for (std::size_t l = c.size(); l-- > static_cast<std::size_t>(r);) {
        double f = 1.0;
        for (int q = 0; q < r; ++q) f *= static_cast<double>(l) - q;
        acc = acc * t + c[l] * f;
    }
    return acc;
}

Rational PiecewisePolynomial::left_limit(const Rational& x, int r) const {
    if (knots_.empty() || x <= knots_.front()) return 0;
    if (x > knots_.back()) return r == 0 ? tail_ : Rational(0);
    auto it = std::lower_bound(knots_.begin(), knots_.end(), x);
    auto i = static_cast<std::size_t>(it - knots_.begin()) - 1;
    return poly::derivative_value(pieces_[i], x - knots_[i], r);
}

Rational PiecewisePolynomial::right_limit(const Rational& x, int r) const {
    if (knots_.empty() || x < knots_.front()) return 0;
    if (x >= knots_.back()) return r == 0 ? tail_ : Rational(0);
    auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
    auto i = static_cast<std::size_t>(it - knots_.begin()) - 1;
    return poly::derivative_value(pieces_[i], x - knots_[i], r);
}

PiecewisePolynomial PiecewisePolynomial::derivative() const {
    std::vector<Coeffs> out;
    for (const auto& p : pieces_) {
        Coeffs d;
        for (std::size_t l = 1; l < p.size(); ++l) d.push_back(p[l] * Rational(static_cast<long long>(l)));
        if (d.empty()) d.push_back(0);
        out.push_back(std::move(d));
    }
    return PiecewisePolynomial(knots_, std::move(out), 0);
}

PiecewisePolynomial PiecewisePolynomial::antiderivative() const {
    if (tail_ != 0) fail(ErrorKind::InvalidArgument, "antiderivative of a function with nonzero tail");
    std::vector<Coeffs> out;
    Rational acc = 0;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        const auto& p = pieces_[i];
        Coeffs F(p.size() + 1);
        F[0] = acc;
        for (std::size_t l = 0; l < p.size(); ++l) F[l + 1] = p[l] / Rational(static_cast<long long>(l + 1));
        acc = poly::eval(F, knots_[i + 1] - knots_[i]);
        out.push_back(std::move(F));
    }
    return PiecewisePolynomial(knots_, std::move(out), acc);
}

Rational PiecewisePolynomial::integral() const {
    if (tail_ != 0) fail(ErrorKind::InvalidArgument, "integral of a function with nonzero tail");
    return antiderivative().right_tail();
}

Rational PiecewisePolynomial::integral(const Rational& a, const Rational& b) const {
    if (tail_ != 0) fail(ErrorKind::InvalidArgument, "integral of a function with nonzero tail");
    auto F = antiderivative();
    return F.eval_exact(b) - F.eval_exact(a);
}

Rational PiecewisePolynomial::moment(int beta) const {
    if (tail_ != 0) fail(ErrorKind::InvalidArgument, "moment of a function with nonzero tail");
    Rational total = 0;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        // x^beta = (t + k)^beta with t = x - k
        Coeffs mono(static_cast<std::size_t>(beta) + 1, Rational(0));
        mono[static_cast<std::size_t>(beta)] = 1;
        Coeffs about_k = poly::shift(mono, knots_[i]);
        auto prod = poly::multiply(pieces_[i], about_k);
        Rational h = knots_[i + 1] - knots_[i];
        Rational hp = h;
        for (std::size_t l = 0; l < prod.size(); ++l) {
            total += prod[l] * hp / Rational(static_cast<long long>(l + 1));
            hp *= h;
        }
    }
    return total;
}

PiecewisePolynomial PiecewisePolynomial::affine(const Rational& s, const Rational& c) const {
    if (s <= 0) fail(ErrorKind::InvalidArgument, "affine: scale must be positive");
    std::vector<Rational> k;
    for (const auto& v : knots_) k.push_back((v + c) / s);
    std::vector<Coeffs> out;
    for (const auto& p : pieces_) {
        Coeffs q(p);
        Rational f = 1;
        for (auto& v : q) {
            v *= f;
            f *= s;
        }
        out.push_back(std::move(q));
    }
    return PiecewisePolynomial(std::move(k), std::move(out), tail_);
}

static std::vector<Rational> merge_knots(const std::vector<Rational>& a, const std::vector<Rational>& b) {
    std::vector<Rational> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

PiecewisePolynomial PiecewisePolynomial::refined(const std::vector<Rational>& knots) const {
    std::vector<Coeffs> out;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const Rational mid = (knots[i] + knots[i + 1]) / 2;
        auto idx = locate(mid);
        if (idx < 0)
            out.push_back(Coeffs{0});
        else if (idx >= static_cast<std::ptrdiff_t>(pieces_.size()))
            out.push_back(Coeffs{tail_});
        else
            out.push_back(poly::shift(pieces_[idx], knots[i] - knots_[idx]));
    }
    if (knots.empty()) return PiecewisePolynomial();
    return PiecewisePolynomial(knots, std::move(out), tail_);
}

static PiecewisePolynomial::Coeffs add_coeffs(const PiecewisePolynomial::Coeffs& a,
                                              const PiecewisePolynomial::Coeffs& b, const Rational& sb) {
    PiecewisePolynomial::Coeffs r(std::max(a.size(), b.size()), Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += sb * b[i];
    while (r.size() > 1 && r.back() == 0) r.pop_back();
    return r;
}

PiecewisePolynomial PiecewisePolynomial::operator+(const PiecewisePolynomial& o) const {
    if (o.empty() && o.tail_ == 0) return *this;
    if (empty() && tail_ == 0) return o;
    auto k = merge_knots(knots_, o.knots_);
    auto a = refined(k), b = o.refined(k);
    std::vector<Coeffs> out;
    for (std::size_t i = 0; i < a.pieces_.size(); ++i) out.push_back(add_coeffs(a.pieces_[i], b.pieces_[i], 1));
    return PiecewisePolynomial(std::move(k), std::move(out), tail_ + o.tail_);
}

PiecewisePolynomial PiecewisePolynomial::operator-(const PiecewisePolynomial& o) const {
    return *this + o.scaled(-1);
}

PiecewisePolynomial PiecewisePolynomial::scaled(const Rational& s) const {
    std::vector<Coeffs> out;
    for (const auto& p : pieces_) {
        Coeffs q(p);
        for (auto& v : q) v *= s;
        out.push_back(std::move(q));
    }
    if (knots_.empty()) return PiecewisePolynomial();
    return PiecewisePolynomial(knots_, std::move(out), tail_ * s);
}

PiecewisePolynomial PiecewisePolynomial::operator*(const PiecewisePolynomial& o) const {
    if (empty() || o.empty()) {
        // a zero function or a pure constant tail; only zero-tails are supported here
        if (tail_ != 0 || o.tail_ != 0) fail(ErrorKind::InvalidArgument, "product with pure tail");
        return PiecewisePolynomial();
    }
    auto k = merge_knots(knots_, o.knots_);
    auto a = refined(k), b = o.refined(k);
    std::vector<Coeffs> out;
    for (std::size_t i = 0; i < a.pieces_.size(); ++i) {
        auto p = poly::multiply(a.pieces_[i], b.pieces_[i]);
        while (p.size() > 1 && p.back() == 0) p.pop_back();
        out.push_back(std::move(p));
    }
    return PiecewisePolynomial(std::move(k), std::move(out), tail_ * o.tail_);
}

PiecewisePolynomial PiecewisePolynomial::box_smooth() const {
    auto F = antiderivative();
    auto minus = F.affine(1, Rational(1, 2));  // F(x - 1/2)
    auto plus = F.affine(1, Rational(-1, 2));  // F(x + 1/2)
    return (plus - minus).trimmed();
}

PiecewisePolynomial PiecewisePolynomial::trimmed() const {
    if (pieces_.empty()) return *this;
    auto is_zero = [](const Coeffs& c) {
        return std::all_of(c.begin(), c.end(), [](const Rational& v) { return v == 0; });
    };
    std::size_t lo = 0, hi = pieces_.size();
    while (lo < hi && is_zero(pieces_[lo])) ++lo;
    if (tail_ == 0)
        while (hi > lo && is_zero(pieces_[hi - 1])) --hi;
    if (lo == hi) return tail_ == 0 ? PiecewisePolynomial() : *this;
    std::vector<Rational> k(knots_.begin() + static_cast<std::ptrdiff_t>(lo),
                            knots_.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
    std::vector<Coeffs> p(pieces_.begin() + static_cast<std::ptrdiff_t>(lo),
                          pieces_.begin() + static_cast<std::ptrdiff_t>(hi));
    for (auto& c : p)
        while (c.size() > 1 && c.back() == 0) c.pop_back();
    return PiecewisePolynomial(std::move(k), std::move(p), tail_);
}

static std::string rat_str(const Rational& r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

static Rational parse_rat(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(BigInt(s));
    return Rational(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
}

nlohmann::json PiecewisePolynomial::to_json() const {
    nlohmann::json j;
    j["knots"] = nlohmann::json::array();
    for (const auto& k : knots_) j["knots"].push_back(rat_str(k));
    j["pieces"] = nlohmann::json::array();
    for (const auto& p : pieces_) {
        auto arr = nlohmann::json::array();
        for (const auto& v : p) arr.push_back(rat_str(v));
        j["pieces"].push_back(arr);
    }
    j["right_tail"] = rat_str(tail_);
    j["basis"] = "shifted-monomial-left-knot";
    return j;
}

PiecewisePolynomial PiecewisePolynomial::from_json(const nlohmann::json& j) {
    std::vector<Rational> k;
    for (const auto& v : j.at("knots")) k.push_back(parse_rat(v.get<std::string>()));
    std::vector<Coeffs> p;
    for (const auto& arr : j.at("pieces")) {
        Coeffs c;
        for (const auto& v : arr) c.push_back(parse_rat(v.get<std::string>()));
        p.push_back(std::move(c));
    }
    Rational tail = j.contains("right_tail") ? parse_rat(j["right_tail"].get<std::string>()) : Rational(0);
    return PiecewisePolynomial(std::move(k), std::move(p), std::move(tail));
}

}  // namespace hwr
