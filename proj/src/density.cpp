#include "hwr/density.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>

#include "hwr/errors.hpp"

namespace hwr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846;
constexpr double kClamp = 1e-15;

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
double std_normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi); }

double std_normal_quantile(double p, double q) {
    boost::math::normal_distribution<double> nd;
    if (p <= 0.5) return boost::math::quantile(nd, p);
    return boost::math::quantile(boost::math::complement(nd, q));
}

class Normal final : public Density {
public:
    std::string name() const override { return "normal"; }
    DomainKind domain() const override { return DomainKind::RealLine; }
    double pdf(double y) const override { return std_normal_pdf(y); }
    double cdf_core(double y) const override { return std_normal_cdf(y); }
    std::optional<double> quantile(double p, double q) const override { return std_normal_quantile(p, q); }
    nlohmann::json to_json() const override { return {{"name", name()}}; }
};

class Cauchy final : public Density {
public:
    std::string name() const override { return "cauchy"; }
    DomainKind domain() const override { return DomainKind::RealLine; }
    double pdf(double y) const override { return 1.0 / (kPi * (1.0 + y * y)); }
    double cdf_core(double y) const override { return 0.5 + std::atan(y) / kPi; }
    std::optional<double> quantile(double p, double q) const override {
        return p <= 0.5 ? std::tan(kPi * (p - 0.5)) : std::tan(kPi * (0.5 - q));
    }
    nlohmann::json to_json() const override { return {{"name", name()}}; }
};

class Laplace final : public Density {
public:
    std::string name() const override { return "laplace"; }
    DomainKind domain() const override { return DomainKind::RealLine; }
    double pdf(double y) const override { return 0.125 * std::exp(-std::abs(y - 2.0) / 4.0); }
    double cdf_core(double y) const override {
        return y < 2.0 ? 0.5 * std::exp((y - 2.0) / 4.0) : 1.0 - 0.5 * std::exp(-(y - 2.0) / 4.0);
    }
    std::optional<double> quantile(double p, double q) const override {
        return p <= 0.5 ? 2.0 + 4.0 * std::log(2.0 * p) : 2.0 - 4.0 * std::log(2.0 * q);
    }
    nlohmann::json to_json() const override { return {{"name", name()}}; }
};

class Exponential final : public Density {
public:
    std::string name() const override { return "exponential"; }
    DomainKind domain() const override { return DomainKind::RealLine; }
    double pdf(double y) const override { return y < 0 ? 0.0 : 0.5 * std::exp(-0.5 * y); }
    double cdf_core(double y) const override { return y < 0 ? 0.0 : -std::expm1(-0.5 * y); }
    std::optional<double> quantile(double p, double q) const override {
        return p <= 0.5 ? -2.0 * std::log1p(-p) : -2.0 * std::log(q);
    }
    double support_lo() const override { return 0.0; }
    nlohmann::json to_json() const override { return {{"name", name()}}; }
};

class Mixture final : public Density {
public:
    std::string name() const override { return "mixture"; }
    DomainKind domain() const override { return DomainKind::RealLine; }
    double pdf(double y) const override {
        return std::exp(-(y + 2.0) * (y + 2.0) / 2.88) / std::sqrt(11.52 * kPi) +
               std::exp(-(y - 3.0) * (y - 3.0) / 12.5) / std::sqrt(50.0 * kPi);
    }
    double cdf_core(double y) const override {
        return 0.5 * std_normal_cdf((y + 2.0) / 1.2) + 0.5 * std_normal_cdf((y - 3.0) / 2.5);
    }
    nlohmann::json to_json() const override { return {{"name", name()}}; }
};

class Uniform final : public Density {
public:
    std::string name() const override { return "uniform"; }
    DomainKind domain() const override { return DomainKind::UnitInterval; }
    double pdf(double y) const override { return (y >= 0.0 && y <= 1.0) ? 1.0 : 0.0; }
    double cdf_core(double y) const override { return std::clamp(y, 0.0, 1.0); }
    std::optional<double> quantile(double p, double) const override { return p; }
    nlohmann::json to_json() const override { return {{"name", name()}}; }
};

class TorusUniform final : public Density {
public:
    std::string name() const override { return "torus-uniform"; }
    DomainKind domain() const override { return DomainKind::Torus; }
    double pdf(double) const override { return 1.0; }
    double cdf_core(double y) const override { return std::clamp(y + 0.5, 0.0, 1.0); }
    std::optional<double> quantile(double p, double) const override { return p - 0.5; }
    nlohmann::json to_json() const override { return {{"name", name()}}; }
};

class Beta final : public Density {
public:
    explicit Beta(double a) : a_(a) {
        if (!(a > 0)) fail(ErrorKind::InvalidArgument, "beta: alpha must be positive");
        lognorm_ = std::lgamma(2 * a) - 2 * std::lgamma(a);
    }
    std::string name() const override { return "beta"; }
    DomainKind domain() const override { return DomainKind::UnitInterval; }
    double pdf(double y) const override {
        if (y < 0.0 || y > 1.0) return 0.0;
        if (a_ == 1.0) return 1.0;
        return std::exp(lognorm_ + (a_ - 1.0) * (std::log(y) + std::log1p(-y)));
    }
    double cdf_core(double y) const override {
        if (y <= 0.0) return 0.0;
        if (y >= 1.0) return 1.0;
        if (a_ == 0.5) return std::acos(1.0 - 2.0 * y) / kPi;
        if (a_ == 1.0) return y;
        if (a_ == 2.0) return y * y * (3.0 - 2.0 * y);
        if (a_ == 3.0) return y * y * y * (10.0 - 15.0 * y + 6.0 * y * y);
        return boost::math::ibeta(a_, a_, y);
    }
    std::optional<double> quantile(double p, double q) const override {
        if (a_ == 0.5) {
            double s = std::sin(0.5 * kPi * (p <= 0.5 ? p : q));
            return p <= 0.5 ? s * s : 1.0 - s * s;
        }
        if (a_ == 1.0) return p;
        return p <= 0.5 ? boost::math::ibeta_inv(a_, a_, p) : 1.0 - boost::math::ibeta_inv(a_, a_, q);
    }
    nlohmann::json to_json() const override { return {{"name", name()}, {"alpha", a_}}; }

private:
    double a_;
    double lognorm_;
};

// [0,1] density moved to the torus by y -> y - 1/2
class TorusShift final : public Density {
public:
    explicit TorusShift(DensityPtr inner) : inner_(std::move(inner)) {}
    std::string name() const override { return inner_->name(); }
    DomainKind domain() const override { return DomainKind::Torus; }
    double pdf(double y) const override { return inner_->pdf(y + 0.5); }
    double cdf_core(double y) const override { return inner_->cdf_core(y + 0.5); }
    std::optional<double> quantile(double p, double q) const override {
        auto v = inner_->quantile(p, q);
        if (v) *v -= 0.5;
        return v;
    }
    nlohmann::json to_json() const override {
        auto j = inner_->to_json();
        j["domain"] = "torus";
        return j;
    }

private:
    DensityPtr inner_;
};

class Tabulated final : public Density {
public:
    Tabulated(std::vector<double> y, std::vector<double> rho, DomainKind kind)
        : y_(std::move(y)), rho_(std::move(rho)), kind_(kind) {
        if (y_.size() < 2 || y_.size() != rho_.size())
            fail(ErrorKind::Data, "tabulated density needs at least two (y, rho) pairs");
        for (std::size_t i = 0; i < y_.size(); ++i) {
            if (!(rho_[i] >= 0) || !std::isfinite(rho_[i])) fail(ErrorKind::Data, "tabulated density must be finite and >= 0");
            if (i && !(y_[i] > y_[i - 1])) fail(ErrorKind::Data, "tabulated y must increase strictly");
        }
        cum_.assign(y_.size(), 0.0);
        for (std::size_t i = 1; i < y_.size(); ++i)
            cum_[i] = cum_[i - 1] + 0.5 * (rho_[i] + rho_[i - 1]) * (y_[i] - y_[i - 1]);
        total_ = cum_.back();
        if (!(total_ > 0)) fail(ErrorKind::Data, "tabulated density has zero mass");
    }
    std::string name() const override { return "tabulated"; }
    DomainKind domain() const override { return kind_; }
    double pdf(double y) const override {
        if (y < y_.front() || y > y_.back()) return 0.0;
        auto i = cell(y);
        double t = (y - y_[i]) / (y_[i + 1] - y_[i]);
        return ((1 - t) * rho_[i] + t * rho_[i + 1]) / total_;
    }
    double cdf_core(double y) const override {
        if (y <= y_.front()) return 0.0;
        if (y >= y_.back()) return 1.0;
        auto i = cell(y);
        double h = y - y_[i];
        double slope = (rho_[i + 1] - rho_[i]) / (y_[i + 1] - y_[i]);
        return (cum_[i] + rho_[i] * h + 0.5 * slope * h * h) / total_;
    }
    double support_lo() const override { return y_.front(); }
    double support_hi() const override { return y_.back(); }
    nlohmann::json to_json() const override {
        return {{"name", name()}, {"domain", to_string(kind_)}, {"y", y_}, {"rho", rho_}};
    }

private:
    std::size_t cell(double y) const {
        auto it = std::upper_bound(y_.begin(), y_.end(), y);
        auto i = static_cast<std::size_t>(it - y_.begin());
        return std::min(i == 0 ? 0 : i - 1, y_.size() - 2);
    }
    std::vector<double> y_, rho_, cum_;
    DomainKind kind_;
    double total_ = 0;
};

}  // namespace

std::string to_string(DomainKind k) {
    switch (k) {
        case DomainKind::Torus: return "torus";
        case DomainKind::RealLine: return "real";
        case DomainKind::UnitInterval: return "unit";
    }
    return "?";
}

DomainKind parse_domain(const std::string& s) {
    if (s == "torus") return DomainKind::Torus;
    if (s == "real" || s == "R") return DomainKind::RealLine;
    if (s == "unit" || s == "[0,1]") return DomainKind::UnitInterval;
    fail(ErrorKind::Config, "unknown domain kind '" + s + "'");
}

double Density::support_lo() const {
    switch (domain()) {
        case DomainKind::Torus: return -0.5;
        case DomainKind::RealLine: return -kInf;
        case DomainKind::UnitInterval: return 0.0;
    }
    return -kInf;
}

double Density::support_hi() const {
    switch (domain()) {
        case DomainKind::Torus: return 0.5;
        case DomainKind::RealLine: return kInf;
        case DomainKind::UnitInterval: return 1.0;
    }
    return kInf;
}

DensityPtr make_normal() { return std::make_shared<Normal>(); }
DensityPtr make_cauchy() { return std::make_shared<Cauchy>(); }
DensityPtr make_laplace() { return std::make_shared<Laplace>(); }
DensityPtr make_beta(double alpha) { return std::make_shared<Beta>(alpha); }
DensityPtr make_exponential() { return std::make_shared<Exponential>(); }
DensityPtr make_mixture() { return std::make_shared<Mixture>(); }
DensityPtr make_uniform() { return std::make_shared<Uniform>(); }
DensityPtr make_torus_uniform() { return std::make_shared<TorusUniform>(); }

DensityPtr make_tabulated(std::vector<double> y, std::vector<double> rho, DomainKind kind) {
    return std::make_shared<Tabulated>(std::move(y), std::move(rho), kind);
}

DensityPtr load_tabulated_csv(const std::string& path, DomainKind kind) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Config, "cannot open density table " + path);
    std::vector<double> y, rho;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double a, b;
        if (!(ss >> a >> b)) continue;  // header or junk line
        y.push_back(a);
        rho.push_back(b);
    }
    return make_tabulated(std::move(y), std::move(rho), kind);
}

DensityPtr make_density(const nlohmann::json& spec) {
    std::string name = spec.is_string() ? spec.get<std::string>() : spec.at("name").get<std::string>();
    if (name == "normal") return make_normal();
    if (name == "cauchy") return make_cauchy();
    if (name == "laplace") return make_laplace();
    if (name == "exponential") return make_exponential();
    if (name == "mixture") return make_mixture();
    if (name == "uniform") return make_uniform();
    if (name == "torus-uniform") return make_torus_uniform();
    if (name == "beta") {
        double a = spec.is_object() && spec.contains("alpha") ? spec["alpha"].get<double>() : 0.5;
        auto b = make_beta(a);
        if (spec.is_object() && spec.value("domain", std::string("unit")) == "torus") return std::make_shared<TorusShift>(b);
        return b;
    }
    if (name == "tabulated") {
        if (!spec.is_object()) fail(ErrorKind::Config, "tabulated density needs an object spec");
        DomainKind kind = spec.contains("domain") ? parse_domain(spec["domain"].get<std::string>()) : DomainKind::RealLine;
        if (spec.contains("file")) return load_tabulated_csv(spec["file"].get<std::string>(), kind);
        return make_tabulated(spec.at("y").get<std::vector<double>>(), spec.at("rho").get<std::vector<double>>(), kind);
    }
    fail(ErrorKind::Config, "unknown density '" + name + "'");
}

double monotone_solve(const std::function<double(double)>& F, const std::function<double(double)>& f,
                      double target, double lo, double hi, const RootOptions& opt) {
    // bracket
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
        double a = std::isfinite(lo) ? lo : std::min(-1.0, std::isfinite(hi) ? hi - 1.0 : -1.0);
        double b = std::isfinite(hi) ? hi : std::max(1.0, std::isfinite(lo) ? lo + 1.0 : 1.0);
        for (int i = 0; i < 2000 && !std::isfinite(lo) && F(a) > target; ++i) a = 2.0 * a - 1.0;
        for (int i = 0; i < 2000 && !std::isfinite(hi) && F(b) < target; ++i) b = 2.0 * b + 1.0;
        lo = a;
        hi = b;
    }
    if (F(lo) > target || F(hi) < target) fail(ErrorKind::Range, "monotone_solve: target outside range");
    double y = 0.5 * (lo + hi);
    for (int it = 0; it < opt.max_iter; ++it) {
        const double r = F(y) - target;
        if (std::abs(r) < opt.tol) return y;
        if (r < 0) lo = y;
        else hi = y;
        const double g = f(y);
        double next = (g > 0) ? y - r / g : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == y || hi - lo <= 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(y))) return next;
        y = next;
    }
    if (std::abs(F(y) - target) < 1e3 * opt.tol) return y;
    fail(ErrorKind::Numeric, "monotone_solve: no convergence");
}

std::pair<double, double> Transform1D::range() const {
    return {-0.5 + eta(), 0.5};
}

void Transform1D::forward_batch(const double* y, std::size_t n, double* x, std::size_t sy, std::size_t sx) const {
    for (std::size_t i = 0; i < n; ++i) x[i * sx] = forward(y[i * sy]);
}

DensityTransform::DensityTransform(DensityPtr density, double eta, RootOptions root)
    : density_(std::move(density)), eta_(eta), root_(root) {
    if (!density_) fail(ErrorKind::InvalidArgument, "null density");
    if (density_->domain() != DomainKind::UnitInterval) eta_ = 0.0;
    if (!(eta_ >= 0.0 && eta_ < 1.0)) fail(ErrorKind::InvalidArgument, "eta must lie in [0,1)");
}

double DensityTransform::forward(double y) const {
    if (std::isnan(y) || y < density_->support_lo() || y > density_->support_hi())
        fail(ErrorKind::Domain, "transform: y=" + std::to_string(y) + " outside the domain of " + density_->name());
    const double c = density_->cdf_core(y);
    double x = domain() == DomainKind::UnitInterval ? eta_ + (1.0 - eta_) * c - 0.5 : c - 0.5;
    return std::clamp(x, -0.5 + eta_, 0.5);
}

double DensityTransform::derivative(double y) const {
    const double r = density_->pdf(y);
    return domain() == DomainKind::UnitInterval ? (1.0 - eta_) * r : r;
}

double DensityTransform::inverse(double x) const {
    const double lo = -0.5 + eta_;
    if (std::isnan(x) || x < lo - kClamp || x > 0.5 + kClamp)
        fail(ErrorKind::Range, "inverse transform: x=" + std::to_string(x) + " outside the range");
    if (domain() == DomainKind::RealLine) {
        const double a = std::nextafter(-0.5, 0.0), b = std::nextafter(0.5, 0.0);
        x = std::clamp(x, a, b);
    } else {
        x = std::clamp(x, lo, 0.5);
    }
    double p, q;
    if (domain() == DomainKind::UnitInterval) {
        p = (x - lo) / (1.0 - eta_);
        q = (0.5 - x) / (1.0 - eta_);
    } else {
        p = x + 0.5;
        q = 0.5 - x;
    }
    if (auto v = density_->quantile(p, q)) return *v;
    const Density& d = *density_;
    return monotone_solve([&](double y) { return d.cdf_core(y); }, [&](double y) { return d.pdf(y); }, p,
                          d.support_lo(), d.support_hi(), root_);
}

std::shared_ptr<const Transform1D> DensityTransform::with_eta(double eta) const {
    if (domain() != DomainKind::UnitInterval) return shared_from_this();
    return std::make_shared<DensityTransform>(density_, eta, root_);
}

nlohmann::json DensityTransform::to_json() const {
    return {{"type", "density"}, {"density", density_->to_json()}, {"eta", eta_}, {"domain", to_string(domain())}};
}

TransformPtr make_transform(DensityPtr density, double eta) {
    return std::make_shared<DensityTransform>(std::move(density), eta);
}

double default_eta(int m, int n, int d) {
    if (m < 1 || n < 0 || d < 1) fail(ErrorKind::InvalidArgument, "default_eta: need m>=1, n>=0, d>=1");
    const int e = (n + d - 1) / d + 1;
    return static_cast<double>(m - 1) / std::ldexp(1.0, e);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::vector<double> sample(const Density& rho, std::size_t M, Rng& rng) {
    if (M < 1) fail(ErrorKind::InvalidArgument, "sample: M must be >= 1");
    std::vector<double> out(M);
    for (auto& v : out) {
        const double u = rng.uniform();
        if (auto y = rho.quantile(u, 1.0 - u)) {
            v = *y;
        } else {
            v = monotone_solve([&](double y) { return rho.cdf_core(y); }, [&](double y) { return rho.pdf(y); }, u,
                               rho.support_lo(), rho.support_hi());
        }
        v = std::clamp(v, rho.support_lo(), rho.support_hi());
    }
    return out;
}

std::vector<double> sample(const Density& rho, std::size_t M, std::uint64_t seed) {
    Rng rng(seed);
    return sample(rho, M, rng);
}

std::vector<double> sample_product(const std::vector<DensityPtr>& densities, std::size_t M, std::uint64_t seed) {
    const std::size_t d = densities.size();
    std::vector<double> Y(M * d);
    for (std::size_t i = 0; i < d; ++i) {
        auto col = sample(*densities[i], M, derive_seed(seed, i));
        for (std::size_t s = 0; s < M; ++s) Y[s * d + i] = col[s];
    }
    return Y;
}

}  // namespace hwr
