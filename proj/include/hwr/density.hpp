#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace hwr {

enum class DomainKind { Torus, RealLine, UnitInterval };

std::string to_string(DomainKind k);
DomainKind parse_domain(const std::string& s);

// One-dimensional density with a closed-form (or tabulated) cumulative core.
// cdf_core integrates from the domain's left anchor: -1/2 (torus), -inf (real line), 0 (unit interval).
class Density {
public:
    virtual ~Density() = default;
    virtual std::string name() const = 0;
    virtual DomainKind domain() const = 0;
    virtual double pdf(double y) const = 0;
    virtual double cdf_core(double y) const = 0;
    // Analytic inverse of cdf_core where available. q = 1 - p is passed separately so
    // upper-tail callers keep full precision.
    virtual std::optional<double> quantile(double p, double q) const {
        (void)p;
        (void)q;
        return std::nullopt;
    }
    virtual double support_lo() const;
    virtual double support_hi() const;
    virtual nlohmann::json to_json() const = 0;
};

using DensityPtr = std::shared_ptr<const Density>;

DensityPtr make_normal();
DensityPtr make_cauchy();
DensityPtr make_laplace();      // (1/8) exp(-|y-2|/4)
DensityPtr make_beta(double alpha);
DensityPtr make_exponential();  // (1/2) exp(-y/2), y >= 0
DensityPtr make_mixture();      // two-Gaussian mixture with means -2 and 3
DensityPtr make_uniform();      // uniform on [0,1]
DensityPtr make_torus_uniform();
// Tabulated (y, rho(y)) pairs: piecewise-linear density, piecewise-quadratic monotone CDF.
DensityPtr make_tabulated(std::vector<double> y, std::vector<double> rho, DomainKind kind);
DensityPtr load_tabulated_csv(const std::string& path, DomainKind kind);

// {"name": "normal"}, {"name": "beta", "alpha": 0.5}, {"name": "tabulated", "file": ..., "domain": ...}
DensityPtr make_density(const nlohmann::json& spec);

struct RootOptions {
    double tol = 1e-12;
    int max_iter = 100;
};

// Solve F(y) = target for nondecreasing F with derivative f on [lo, hi] (infinite bounds allowed).
double monotone_solve(const std::function<double(double)>& F, const std::function<double(double)>& f,
                      double target, double lo, double hi, const RootOptions& opt = {});

class Transform1D {
public:
    virtual ~Transform1D() = default;
    virtual DomainKind domain() const = 0;
    virtual double eta() const { return 0.0; }
    virtual double forward(double y) const = 0;
    virtual double inverse(double x) const = 0;
    // d/dy forward(y)
    virtual double derivative(double y) const = 0;
    virtual std::pair<double, double> range() const;
    // Copy with another extension parameter; transforms that do not use one return themselves.
    virtual std::shared_ptr<const Transform1D> with_eta(double eta) const = 0;
    virtual nlohmann::json to_json() const = 0;

    void forward_batch(const double* y, std::size_t n, double* x, std::size_t stride_y = 1,
                       std::size_t stride_x = 1) const;
};

using TransformPtr = std::shared_ptr<const Transform1D>;

class DensityTransform : public Transform1D, public std::enable_shared_from_this<DensityTransform> {
public:
    DensityTransform(DensityPtr density, double eta = 0.0, RootOptions root = {});
    const Density& density() const { return *density_; }
    DensityPtr density_ptr() const { return density_; }
    DomainKind domain() const override { return density_->domain(); }
    double eta() const override { return eta_; }
    double forward(double y) const override;
    double inverse(double x) const override;
    double derivative(double y) const override;
    std::shared_ptr<const Transform1D> with_eta(double eta) const override;
    nlohmann::json to_json() const override;

private:
    DensityPtr density_;
    double eta_;
    RootOptions root_;
};

TransformPtr make_transform(DensityPtr density, double eta = 0.0);

// eta = (m-1) / 2^(ceil(n/d)+1)
double default_eta(int m, int n, int d);

// Independent stream seed derived from a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    // uniform in the open interval (0,1), 53-bit resolution
    double uniform() { return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53; }
    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
};

std::vector<double> sample(const Density& rho, std::size_t M, Rng& rng);
std::vector<double> sample(const Density& rho, std::size_t M, std::uint64_t seed);
// M x d row-major; column i from densities[i], each with its own derived stream
std::vector<double> sample_product(const std::vector<DensityPtr>& densities, std::size_t M, std::uint64_t seed);

}  // namespace hwr
