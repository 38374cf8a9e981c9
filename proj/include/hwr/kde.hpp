#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hwr/density.hpp"

namespace hwr {

enum class KernelKind { Gaussian, BSpline3 };

class KernelSpec {
public:
    explicit KernelSpec(KernelKind kind);
    KernelKind kind() const { return kind_; }
    std::string name() const;
    double pdf(double u) const;
    // antiderivative K with K(-inf) = 0, K(+inf) = 1
    double cdf(double u) const;
    // r-th derivative, r <= 6 (Gaussian only for r > 2)
    double derivative(double u, int r) const;
    double l2_norm_sq() const { return l2_; }
    double second_moment() const { return mu2_; }
    // half-width of the support; infinity for the Gaussian
    double half_support() const { return half_; }
    // |u| beyond which pdf is exactly 0 in double and cdf is 0 or 1
    double cutoff() const { return cutoff_; }

private:
    KernelKind kind_;
    double l2_, mu2_, half_, cutoff_;
};

const KernelSpec& gaussian_kernel();
const KernelSpec& bspline3_kernel();

struct BandwidthRule {
    enum class Kind { Rot, Dpi, Fixed } kind = Kind::Dpi;
    double value = 0.0;
    static BandwidthRule parse(const std::string& s);  // "rot", "dpi", "fixed:0.1"
    std::string str() const;
};

// Data-driven transform x = (1/M) sum_s K((y - s)/sigma) - 1/2.
class EstimatedTransform : public Transform1D, public std::enable_shared_from_this<EstimatedTransform> {
public:
    EstimatedTransform(std::vector<double> samples, double sigma, KernelKind kernel, DomainKind domain);

    const std::vector<double>& samples() const { return samples_; }
    double sigma() const { return sigma_; }
    const KernelSpec& kernel() const { return *kernel_; }
    double omega1() const { return omega1_; }
    double omega2() const { return omega2_; }
    const std::vector<std::string>& warnings() const { return warnings_; }
    void add_warning(std::string w) { warnings_.push_back(std::move(w)); }
    void set_method(std::string m) { method_ = std::move(m); }
    const std::string& method() const { return method_; }

    double pdf(double y) const;
    DomainKind domain() const override { return domain_; }
    double forward(double y) const override;
    double inverse(double x) const override;
    double derivative(double y) const override { return pdf(y); }
    std::pair<double, double> range() const override { return {-0.5, 0.5}; }
    std::shared_ptr<const Transform1D> with_eta(double) const override { return shared_from_this(); }
    nlohmann::json to_json() const override;
    static std::shared_ptr<EstimatedTransform> from_json(const nlohmann::json& j);

private:
    std::vector<double> samples_;
    double sigma_;
    const KernelSpec* kernel_;
    DomainKind domain_;
    double omega1_, omega2_;
    std::string method_ = "fixed";
    std::vector<std::string> warnings_;
};

using EstimatedTransformPtr = std::shared_ptr<EstimatedTransform>;

double kde_pdf(const EstimatedTransform& e, double y);
double kde_transform(const EstimatedTransform& e, double y);
double kde_inverse(const EstimatedTransform& e, double x);

double sample_std(const std::vector<double>& Y);
// type-7 (linear interpolation) quantile of unsorted data
double quantile7(std::vector<double> Y, double p);
double iqr(const std::vector<double>& Y);

double bandwidth_rot(const std::vector<double>& Y);
double psi_r_hat(const std::vector<double>& Y, double g, int r);

struct DpiResult {
    double sigma = 0.0;
    double g1 = 0.0, g2 = 0.0;
    double psi8 = 0.0, psi6 = 0.0, psi4 = 0.0;
    bool fallback = false;
    std::string warning;
};
DpiResult bandwidth_dpi_detail(const std::vector<double>& Y);
double bandwidth_dpi(const std::vector<double>& Y);

// Asymptotically optimal bandwidth for a Gaussian kernel given the true Psi_4.
double sigma_amise(double psi4, std::size_t M);

EstimatedTransformPtr gaussian_kde(const std::vector<double>& Y, const BandwidthRule& rule);
// B_3 kernel on [0,1]; sigma <= 0 selects the rule-of-thumb bandwidth
EstimatedTransformPtr boundary_kde(const std::vector<double>& Y, double sigma = 0.0);
// Gaussian kernel on the real line or torus, B_3 boundary kernel on [0,1]
EstimatedTransformPtr estimate_transform(const std::vector<double>& Y, DomainKind domain, const BandwidthRule& rule);

}  // namespace hwr
