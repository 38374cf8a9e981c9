#include "hwr/kde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hwr/errors.hpp"
#include "hwr/simd.hpp"
#include "hwr/spline.hpp"

namespace hwr {

namespace {

constexpr double kPi = 3.14159265358979323846;
const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * kPi);

double b3_pdf(double u) {
    const double a = std::abs(u);
    if (a >= 1.5) return 0.0;
    if (a < 0.5) return 0.75 - a * a;
    const double t = 1.5 - a;
    return 0.5 * t * t;
}

double b3_cdf(double u) {
    if (u <= -1.5) return 0.0;
    if (u >= 1.5) return 1.0;
    if (u < -0.5) {
        const double t = u + 1.5;
        return t * t * t / 6.0;
    }
    if (u <= 0.5) return 0.5 + 0.75 * u - u * u * u / 3.0;
    const double t = 1.5 - u;
    return 1.0 - t * t * t / 6.0;
}

}  // namespace

KernelSpec::KernelSpec(KernelKind kind) : kind_(kind) {
    if (kind == KernelKind::Gaussian) {
        l2_ = 1.0 / (2.0 * std::sqrt(kPi));
        mu2_ = 1.0;
        half_ = std::numeric_limits<double>::infinity();
        cutoff_ = 40.0;
    } else {
        const auto B = bspline(3);
        l2_ = to_double((B * B).integral());
        mu2_ = to_double(B.moment(2));
        half_ = 1.5;
        cutoff_ = 1.5;
    }
}

std::string KernelSpec::name() const { return kind_ == KernelKind::Gaussian ? "gaussian" : "bspline3"; }

double KernelSpec::pdf(double u) const {
    if (kind_ == KernelKind::Gaussian) return kInvSqrt2Pi * std::exp(-0.5 * u * u);
    return b3_pdf(u);
}

double KernelSpec::cdf(double u) const {
    if (kind_ == KernelKind::Gaussian) return 0.5 * std::erfc(-u / std::sqrt(2.0));
    return b3_cdf(u);
}

double KernelSpec::derivative(double u, int r) const {
    if (r < 0 || r > 6) fail(ErrorKind::InvalidArgument, "kernel derivative order must be in 0..6");
    if (kind_ == KernelKind::Gaussian) {
        // d^r/du^r phi(u) = (-1)^r He_r(u) phi(u)
        double h0 = 1.0, h1 = u;
        double h = r == 0 ? h0 : h1;
        for (int k = 2; k <= r; ++k) {
            h = u * h1 - (k - 1) * h0;
            h0 = h1;
            h1 = h;
        }
        return (r % 2 ? -h : h) * pdf(u);
    }
    return bspline(3).derivative_at(u, r);
}

const KernelSpec& gaussian_kernel() {
    static const KernelSpec k(KernelKind::Gaussian);
    return k;
}

const KernelSpec& bspline3_kernel() {
    static const KernelSpec k(KernelKind::BSpline3);
    return k;
}

BandwidthRule BandwidthRule::parse(const std::string& s) {
    BandwidthRule r;
    if (s == "rot") {
        r.kind = Kind::Rot;
    } else if (s == "dpi") {
        r.kind = Kind::Dpi;
    } else if (s.rfind("fixed:", 0) == 0) {
        r.kind = Kind::Fixed;
        try {
            r.value = std::stod(s.substr(6));
        } catch (const std::exception&) {
            fail(ErrorKind::Config, "bad fixed bandwidth '" + s + "'");
        }
        if (!(r.value > 0)) fail(ErrorKind::Config, "fixed bandwidth must be positive");
    } else {
        fail(ErrorKind::Config, "unknown bandwidth rule '" + s + "' (rot, dpi, fixed:<value>)");
    }
    return r;
}

std::string BandwidthRule::str() const {
    switch (kind) {
        case Kind::Rot: return "rot";
        case Kind::Dpi: return "dpi";
        case Kind::Fixed: return "fixed:" + std::to_string(value);
    }
    return "?";
}

EstimatedTransform::EstimatedTransform(std::vector<double> samples, double sigma, KernelKind kernel, DomainKind domain)
    : samples_(std::move(samples)),
      sigma_(sigma),
      kernel_(kernel == KernelKind::Gaussian ? &gaussian_kernel() : &bspline3_kernel()),
      domain_(domain) {
    if (!(sigma_ > 0) || !std::isfinite(sigma_)) fail(ErrorKind::InvalidArgument, "invalid bandwidth sigma");
    if (samples_.empty()) fail(ErrorKind::InvalidArgument, "KDE needs at least one sample");
    for (double s : samples_)
        if (!std::isfinite(s)) fail(ErrorKind::Data, "non-finite KDE sample");
    std::sort(samples_.begin(), samples_.end());
    const double reach = kernel_->half_support() * sigma_;
    if (kernel == KernelKind::BSpline3 && domain == DomainKind::UnitInterval) {
        omega1_ = std::min(0.0, samples_.front() - reach);
        omega2_ = std::max(1.0, samples_.back() + reach);
    } else {
        omega1_ = -std::numeric_limits<double>::infinity();
        omega2_ = std::numeric_limits<double>::infinity();
    }
}

double EstimatedTransform::pdf(double y) const {
    const double c = kernel_->cutoff() * sigma_;
    auto lo = std::lower_bound(samples_.begin(), samples_.end(), y - c);
    auto hi = std::upper_bound(lo, samples_.end(), y + c);
    const auto n = static_cast<std::size_t>(hi - lo);
    const double M = static_cast<double>(samples_.size());
    double acc;
    if (kernel_->kind() == KernelKind::Gaussian) {
        acc = kInvSqrt2Pi * simd::kernels().gauss_sum(&*lo, n, y, 1.0 / sigma_);
    } else {
        acc = 0.0;
        for (auto it = lo; it != hi; ++it) acc += b3_pdf((y - *it) / sigma_);
    }
    return acc / (sigma_ * M);
}

double EstimatedTransform::forward(double y) const {
    if (std::isnan(y) || y < omega1_ || y > omega2_)
        fail(ErrorKind::Domain, "KDE transform: y=" + std::to_string(y) + " outside [omega1, omega2]");
    const double c = kernel_->cutoff() * sigma_;
    auto lo = std::lower_bound(samples_.begin(), samples_.end(), y - c);
    auto hi = std::upper_bound(lo, samples_.end(), y + c);
    double acc = static_cast<double>(lo - samples_.begin());
    for (auto it = lo; it != hi; ++it) acc += kernel_->cdf((y - *it) / sigma_);
    const double x = acc / static_cast<double>(samples_.size()) - 0.5;
    return std::clamp(x, -0.5, 0.5);
}

double EstimatedTransform::inverse(double x) const {
    if (std::isnan(x) || x < -0.5 - 1e-15 || x > 0.5 + 1e-15)
        fail(ErrorKind::Range, "KDE inverse: x outside [-1/2, 1/2]");
    double lo = omega1_, hi = omega2_;
    if (!std::isfinite(lo)) {
        const double c = kernel_->cutoff() * sigma_;
        lo = samples_.front() - c;
        hi = samples_.back() + c;
        x = std::clamp(x, std::nextafter(-0.5, 0.0), std::nextafter(0.5, 0.0));
    } else {
        x = std::clamp(x, -0.5, 0.5);
    }
    return monotone_solve([this](double y) { return forward(y); }, [this](double y) { return pdf(y); }, x, lo, hi);
}

nlohmann::json EstimatedTransform::to_json() const {
    return {{"type", "kde"},    {"kernel", kernel_->name()}, {"sigma", sigma_},   {"domain", to_string(domain_)},
            {"method", method_}, {"samples", samples_},      {"warnings", warnings_}};
}

std::shared_ptr<EstimatedTransform> EstimatedTransform::from_json(const nlohmann::json& j) {
    const std::string k = j.at("kernel").get<std::string>();
    KernelKind kind = k == "gaussian" ? KernelKind::Gaussian : KernelKind::BSpline3;
    auto e = std::make_shared<EstimatedTransform>(j.at("samples").get<std::vector<double>>(), j.at("sigma").get<double>(),
                                                  kind, parse_domain(j.at("domain").get<std::string>()));
    if (j.contains("method")) e->set_method(j["method"].get<std::string>());
    if (j.contains("warnings"))
        for (const auto& w : j["warnings"]) e->add_warning(w.get<std::string>());
    return e;
}

double kde_pdf(const EstimatedTransform& e, double y) { return e.pdf(y); }
double kde_transform(const EstimatedTransform& e, double y) { return e.forward(y); }
double kde_inverse(const EstimatedTransform& e, double x) { return e.inverse(x); }

double sample_std(const std::vector<double>& Y) {
    if (Y.size() < 2) fail(ErrorKind::InvalidArgument, "std needs at least two samples");
    const double mean = std::accumulate(Y.begin(), Y.end(), 0.0) / static_cast<double>(Y.size());
    double ss = 0.0;
    for (double y : Y) ss += (y - mean) * (y - mean);
    return std::sqrt(ss / static_cast<double>(Y.size() - 1));
}

double quantile7(std::vector<double> Y, double p) {
    if (Y.empty()) fail(ErrorKind::InvalidArgument, "quantile of empty data");
    std::sort(Y.begin(), Y.end());
    const double h = (static_cast<double>(Y.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, Y.size() - 1);
    return Y[lo] + (h - static_cast<double>(lo)) * (Y[hi] - Y[lo]);
}

double iqr(const std::vector<double>& Y) { return quantile7(Y, 0.75) - quantile7(Y, 0.25); }

namespace {

double scale_estimate(const std::vector<double>& Y) {
    if (Y.size() < 2) fail(ErrorKind::InvalidArgument, "bandwidth selection needs at least two samples");
    const double sd = sample_std(Y);
    if (!(sd > 0)) fail(ErrorKind::Data, "degenerate sample: all values identical");
    const double q = iqr(Y) / 1.34;
    // a zero IQR with positive spread would zero the bandwidth; fall back to std then
    return q > 0 ? std::min(sd, q) : sd;
}

}  // namespace

double bandwidth_rot(const std::vector<double>& Y) {
    return 1.06 * scale_estimate(Y) * std::pow(static_cast<double>(Y.size()), -0.2);
}

double psi_r_hat(const std::vector<double>& Y, double g, int r) {
    if (!(g > 0)) fail(ErrorKind::InvalidArgument, "psi_r_hat: pilot bandwidth must be positive");
    if (r != 4 && r != 6 && r != 2 && r != 0) fail(ErrorKind::InvalidArgument, "psi_r_hat: r must be even and <= 6");
    if (Y.empty()) fail(ErrorKind::InvalidArgument, "psi_r_hat: empty sample");
    const double M = static_cast<double>(Y.size());
    const double S = simd::kernels().gauss_pair_sum(Y.data(), Y.size(), 1.0 / g, r);
    return kInvSqrt2Pi * S / (M * M * std::pow(g, r + 1));
}

DpiResult bandwidth_dpi_detail(const std::vector<double>& Y) {
    DpiResult res;
    const double M = static_cast<double>(Y.size());
    const double s = scale_estimate(Y);
    const auto& k = gaussian_kernel();
    const double k4 = k.derivative(0.0, 4), k6 = k.derivative(0.0, 6);
    res.psi8 = 105.0 / (32.0 * std::sqrt(kPi) * std::pow(s, 9));
    res.g1 = std::pow(-2.0 * k6 / (k.second_moment() * res.psi8 * M), 1.0 / 9.0);
    res.psi6 = psi_r_hat(Y, res.g1, 6);
    if (!(res.psi6 < 0)) {
        res.fallback = true;
        res.warning = "DPI: estimated Psi_6 >= 0, falling back to rule of thumb";
        res.sigma = bandwidth_rot(Y);
        return res;
    }
    res.g2 = std::pow(-2.0 * k4 / (k.second_moment() * res.psi6 * M), 1.0 / 7.0);
    res.psi4 = psi_r_hat(Y, res.g2, 4);
    if (!(res.psi4 > 0)) {
        res.fallback = true;
        res.warning = "DPI: estimated Psi_4 <= 0, falling back to rule of thumb";
        res.sigma = bandwidth_rot(Y);
        return res;
    }
    const double mu2 = k.second_moment();
    res.sigma = std::pow(k.l2_norm_sq() / (mu2 * mu2 * res.psi4 * M), 0.2);
    return res;
}

double bandwidth_dpi(const std::vector<double>& Y) { return bandwidth_dpi_detail(Y).sigma; }

double sigma_amise(double psi4, std::size_t M) {
    const auto& k = gaussian_kernel();
    return std::pow(k.l2_norm_sq() / (k.second_moment() * k.second_moment() * psi4 * static_cast<double>(M)), 0.2);
}

EstimatedTransformPtr gaussian_kde(const std::vector<double>& Y, const BandwidthRule& rule) {
    double sigma = rule.value;
    std::string warning;
    if (rule.kind == BandwidthRule::Kind::Rot) {
        sigma = bandwidth_rot(Y);
    } else if (rule.kind == BandwidthRule::Kind::Dpi) {
        auto r = bandwidth_dpi_detail(Y);
        sigma = r.sigma;
        warning = r.warning;
    }
    auto e = std::make_shared<EstimatedTransform>(Y, sigma, KernelKind::Gaussian, DomainKind::RealLine);
    e->set_method(rule.str());
    if (!warning.empty()) e->add_warning(warning);
    return e;
}

EstimatedTransformPtr boundary_kde(const std::vector<double>& Y, double sigma) {
    for (double y : Y)
        if (!(y >= 0.0 && y <= 1.0)) fail(ErrorKind::Domain, "boundary KDE: sample outside [0,1]");
    const bool rot = !(sigma > 0);
    if (rot) sigma = bandwidth_rot(Y);
    auto e = std::make_shared<EstimatedTransform>(Y, sigma, KernelKind::BSpline3, DomainKind::UnitInterval);
    e->set_method(rot ? "rot" : "fixed:" + std::to_string(sigma));
    return e;
}

EstimatedTransformPtr estimate_transform(const std::vector<double>& Y, DomainKind domain, const BandwidthRule& rule) {
    if (domain == DomainKind::UnitInterval) {
        EstimatedTransformPtr e;
        if (rule.kind == BandwidthRule::Kind::Fixed) return boundary_kde(Y, rule.value);
        e = boundary_kde(Y, 0.0);
        if (rule.kind == BandwidthRule::Kind::Dpi)
            e->add_warning("DPI is not defined for the boundary kernel on [0,1]; used the rule of thumb");
        return e;
    }
    return gaussian_kde(Y, rule);
}

}  // namespace hwr
