#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "hwr/density.hpp"
#include "hwr/kde.hpp"
#include "hwr/wavelet_basis.hpp"

namespace hwr {

class LinearOperator {
public:
    virtual ~LinearOperator() = default;
    virtual std::size_t rows() const = 0;
    virtual std::size_t cols() const = 0;
    virtual void apply(const double* x, double* out) const = 0;            // out = A x
    virtual void apply_transpose(const double* r, double* out) const = 0;  // out = A^T r
};

class DenseOperator : public LinearOperator {
public:
    explicit DenseOperator(Eigen::MatrixXd A) : A_(std::move(A)) {}
    std::size_t rows() const override { return static_cast<std::size_t>(A_.rows()); }
    std::size_t cols() const override { return static_cast<std::size_t>(A_.cols()); }
    void apply(const double* x, double* out) const override;
    void apply_transpose(const double* r, double* out) const override;
    const Eigen::MatrixXd& matrix() const { return A_; }

private:
    Eigen::MatrixXd A_;
};

// Compressed-row storage of the hyperbolic wavelet matrix; zeros are never stored.
class SparseDesignMatrix : public LinearOperator {
public:
    SparseDesignMatrix() = default;
    SparseDesignMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
                       std::vector<std::int32_t> col, std::vector<double> val);

    std::size_t rows() const override { return rows_; }
    std::size_t cols() const override { return cols_; }
    std::size_t nnz() const { return val_.size(); }
    const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
    const std::vector<std::int32_t>& col_index() const { return col_; }
    const std::vector<double>& values() const { return val_; }

    void apply(const double* x, double* out) const override;
    void apply_transpose(const double* r, double* out) const override;
    double entry(std::size_t row, std::size_t col) const;
    Eigen::MatrixXd to_dense() const;
    // A^T A as a dense matrix
    Eigen::MatrixXd normal_matrix() const;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::int32_t> col_;
    std::vector<double> val_;
};

// Torus coordinates of M points, row-major M x d, one matrix per term of the index set
// (terms may share a matrix). Coordinates outside [-1/2, 1/2] are rejected.
struct TermCoordinates {
    std::size_t M = 0;
    std::size_t d = 0;
    std::vector<const double*> per_term;
};

TermCoordinates uniform_coordinates(const std::vector<double>& X, std::size_t d, const IndexSet& idx);

// Calls emit(column, value) for every nonzero basis value at one point. `point_of_term(t)` gives the
// d torus coordinates used for term t.
void for_each_basis_value(const IndexSet& idx, int m, const std::function<const double*(std::size_t)>& point_of_term,
                          const std::function<void(std::size_t, double)>& emit);

SparseDesignMatrix assemble(const std::vector<double>& X, const IndexSet& idx, int m);
SparseDesignMatrix assemble(const TermCoordinates& coords, const IndexSet& idx, int m);

// A v evaluated from basis values on the fly, without storing A.
class MatrixFreeOperator : public LinearOperator {
public:
    MatrixFreeOperator(TermCoordinates coords, const IndexSet& idx, int m);
    std::size_t rows() const override { return coords_.M; }
    std::size_t cols() const override { return idx_->size(); }
    void apply(const double* x, double* out) const override;
    void apply_transpose(const double* r, double* out) const override;

private:
    TermCoordinates coords_;
    const IndexSet* idx_;
    int m_;
};

struct LsqrOptions {
    double atol = 1e-10;
    double btol = 1e-10;
    double conlim = 1e12;
    std::size_t max_iter = 0;  // 0: 50 N
    bool keep_history = false;
};

struct LsqrResult {
    std::vector<double> x;
    std::size_t iterations = 0;
    double residual_norm = 0.0;         // ||b - A x||
    double normal_residual_norm = 0.0;  // ||A^T (b - A x)||
    double anorm = 0.0;
    double acond = 0.0;
    int istop = 0;
    bool converged = false;
    std::vector<double> residual_history;
    std::string stop_reason() const;
};

LsqrResult lsqr(const LinearOperator& A, const std::vector<double>& b, const LsqrOptions& opt = {});

// cond_2(A) from the extreme eigenvalues of A^T A (dense for small N, Lanczos otherwise)
double condition_number(const LinearOperator& A);

struct SolverStats {
    std::size_t iterations = 0;
    double residual_norm = 0.0;
    double normal_residual_norm = 0.0;
    double acond_estimate = 0.0;
    bool converged = false;
    std::string stop_reason;
};

// Per-dimension recipe for the transform step.
struct TransformPlan {
    enum class Kind { Known, Kde } kind = Kind::Known;
    DensityPtr density;          // Known
    DomainKind domain = DomainKind::RealLine;  // Kde
    BandwidthRule bandwidth;     // Kde

    static TransformPlan known(DensityPtr d);
    static TransformPlan kde(DomainKind domain, BandwidthRule rule);
    static TransformPlan from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct FitOptions {
    int m = 2;
    std::vector<TermSpec> terms;
    std::optional<double> eta_override;
    LsqrOptions lsqr;
    double oversampling_log_base = 2.0;
};

class RegressionModel {
public:
    RegressionModel() = default;
    RegressionModel(int m, IndexSet idx, std::vector<TransformPtr> transforms, std::vector<double> term_eta,
                    std::vector<double> coefficients);

    int order() const { return m_; }
    int dim() const { return index_.dim(); }
    const IndexSet& index_set() const { return index_; }
    const std::vector<double>& coefficients() const { return coef_; }
    const std::vector<TransformPtr>& transforms() const { return transforms_; }
    const std::vector<double>& term_eta() const { return term_eta_; }
    SolverStats& stats() { return stats_; }
    const SolverStats& stats() const { return stats_; }
    std::vector<std::string>& warnings() { return warnings_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

    // Torus coordinates for a batch of M points (row-major M x d).
    struct Coordinates {
        std::vector<std::vector<double>> storage;
        TermCoordinates view;
    };
    Coordinates transform_points(const std::vector<double>& Y, std::size_t M) const;

    double predict(const double* y) const;
    std::vector<double> predict(const std::vector<double>& Y) const;
    // Prediction restricted to the terms in `keep` (by term position), torus input.
    double evaluate_terms_torus(const double* x, const std::vector<std::size_t>& keep) const;

    nlohmann::json to_json() const;
    static RegressionModel from_json(const nlohmann::json& j);

private:
    int m_ = 2;
    IndexSet index_;
    std::vector<TransformPtr> transforms_;
    std::vector<double> term_eta_;
    std::vector<double> coef_;
    SolverStats stats_;
    std::vector<std::string> warnings_;
};

TransformPtr transform_from_json(const nlohmann::json& j);

std::vector<TransformPtr> build_transforms(const std::vector<TransformPlan>& plans, const std::vector<double>& Y,
                                           std::size_t M, std::vector<std::string>* warnings = nullptr);

RegressionModel fit(const std::vector<double>& Y, const std::vector<double>& f, const std::vector<TransformPtr>& transforms,
                    const FitOptions& opt);
RegressionModel fit(const std::vector<double>& Y, const std::vector<double>& f, const std::vector<TransformPlan>& plans,
                    const FitOptions& opt);

// 1-D Gram matrix over I_n on [a, b] (subinterval of the torus) and its extreme eigenvalues.
struct GramResult {
    Eigen::MatrixXd G;
    double mu_min = 0.0;
    double mu_max = 0.0;
};
GramResult gram_restricted(int m, int n, double a, double b = 0.5);

// First row of the circulant same-level Gram on the torus, exact up to rounding.
std::vector<double> level_gram_row(int m, int j);
Eigen::MatrixXd level_gram(int m, int j);

}  // namespace hwr
