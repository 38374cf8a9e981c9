#include <algorithm>
#include <array>
#include <cmath>

#include "hwr/errors.hpp"
#include "hwr/regression.hpp"
#include "hwr/simd.hpp"

namespace hwr {

void DenseOperator::apply(const double* x, double* out) const {
    Eigen::Map<const Eigen::VectorXd> xv(x, A_.cols());
    Eigen::Map<Eigen::VectorXd>(out, A_.rows()) = A_ * xv;
}

void DenseOperator::apply_transpose(const double* r, double* out) const {
    Eigen::Map<const Eigen::VectorXd> rv(r, A_.rows());
    Eigen::Map<Eigen::VectorXd>(out, A_.cols()) = A_.transpose() * rv;
}

SparseDesignMatrix::SparseDesignMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
                                       std::vector<std::int32_t> col, std::vector<double> val)
    : rows_(rows), cols_(cols), row_ptr_(std::move(row_ptr)), col_(std::move(col)), val_(std::move(val)) {
    if (row_ptr_.size() != rows_ + 1 || col_.size() != val_.size() || row_ptr_.back() != val_.size())
        fail(ErrorKind::InvalidArgument, "inconsistent CSR arrays");
}

void SparseDesignMatrix::apply(const double* x, double* out) const {
    simd::kernels().csr_apply(row_ptr_.data(), col_.data(), val_.data(), x, out, rows_);
}

void SparseDesignMatrix::apply_transpose(const double* r, double* out) const {
    std::fill(out, out + cols_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
        const double ri = r[i];
        if (ri == 0.0) continue;
        for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) out[col_[p]] += val_[p] * ri;
    }
}

double SparseDesignMatrix::entry(std::size_t row, std::size_t col) const {
    if (row >= rows_ || col >= cols_) fail(ErrorKind::Range, "matrix entry out of range");
    for (std::size_t p = row_ptr_[row]; p < row_ptr_[row + 1]; ++p)
        if (static_cast<std::size_t>(col_[p]) == col) return val_[p];
    return 0.0;
}

Eigen::MatrixXd SparseDesignMatrix::to_dense() const {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) A(static_cast<Eigen::Index>(i), col_[p]) = val_[p];
    return A;
}

Eigen::MatrixXd SparseDesignMatrix::normal_matrix() const {
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cols_), static_cast<Eigen::Index>(cols_));
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
            for (std::size_t q = row_ptr_[i]; q < row_ptr_[i + 1]; ++q) G(col_[p], col_[q]) += val_[p] * val_[q];
    return G;
}

namespace {

constexpr int kMaxDims = 64;

template <class Emit>
void basis_values(const IndexSet& idx, int m, const std::function<const double*(std::size_t)>& point_of_term, Emit&& emit) {
    const auto& terms = idx.terms();
    const auto& blocks = idx.blocks();
    const std::size_t width = static_cast<std::size_t>(2 * m - 1);
    std::vector<Translate> table;  // [position][level][slot]
    std::vector<int> counts;
    for (std::size_t t = 0; t < terms.size(); ++t) {
        const TermSlice& term = terms[t];
        if (term.u.empty()) {
            emit(term.offset, 1.0);
            continue;
        }
        const double* x = point_of_term(t);
        const std::size_t q = term.u.size();
        const auto L = static_cast<std::size_t>(term.level + 1);
        table.resize(q * L * width);
        counts.assign(q * L, 0);
        for (std::size_t p = 0; p < q; ++p) {
            const double xi = x[term.u[p]];
            if (!(xi >= -0.5 && xi <= 0.5)) fail(ErrorKind::Domain, "torus coordinate outside [-1/2, 1/2]");
            for (std::size_t l = 0; l < L; ++l)
                counts[p * L + l] = active_translates(m, static_cast<int>(l), xi, &table[(p * L + l) * width]);
        }
        std::array<int, kMaxDims> pos{};
        std::array<const Translate*, kMaxDims> lists{};
        std::array<int, kMaxDims> lens{};
        for (std::size_t bi : term.blocks) {
            const LevelBlock& b = blocks[bi];
            bool empty = false;
            for (std::size_t p = 0; p < q; ++p) {
                const auto l = static_cast<std::size_t>(b.j[static_cast<std::size_t>(term.u[p])]);
                lists[p] = &table[(p * L + l) * width];
                lens[p] = counts[p * L + l];
                pos[p] = 0;
                if (lens[p] == 0) empty = true;
            }
            if (empty) continue;
            while (true) {
                double v = 1.0;
                std::size_t col = b.offset;
                for (std::size_t p = 0; p < q; ++p) {
                    const Translate& tr = lists[p][pos[p]];
                    v *= tr.value;
                    col += static_cast<std::size_t>(tr.k) * b.strides[p];
                }
                emit(col, v);
                bool done = true;
                for (std::size_t p = q; p-- > 0;) {
                    if (++pos[p] < lens[p]) {
                        done = false;
                        break;
                    }
                    pos[p] = 0;
                }
                if (done) break;
            }
        }
    }
}

}  // namespace

void for_each_basis_value(const IndexSet& idx, int m, const std::function<const double*(std::size_t)>& point_of_term,
                          const std::function<void(std::size_t, double)>& emit) {
    if (idx.dim() > kMaxDims) fail(ErrorKind::InvalidArgument, "dimension too large");
    basis_values(idx, m, point_of_term, emit);
}

TermCoordinates uniform_coordinates(const std::vector<double>& X, std::size_t d, const IndexSet& idx) {
    if (d == 0 || X.size() % d != 0) fail(ErrorKind::InvalidArgument, "coordinate matrix shape mismatch");
    if (static_cast<int>(d) != idx.dim()) fail(ErrorKind::InvalidArgument, "coordinate dimension differs from index set");
    TermCoordinates c;
    c.M = X.size() / d;
    c.d = d;
    c.per_term.assign(idx.terms().size(), X.data());
    return c;
}

SparseDesignMatrix assemble(const TermCoordinates& coords, const IndexSet& idx, int m) {
    if (idx.dim() > kMaxDims) fail(ErrorKind::InvalidArgument, "dimension too large");
    if (idx.size() > static_cast<std::size_t>(INT32_MAX)) fail(ErrorKind::InvalidArgument, "too many columns");
    std::vector<std::size_t> row_ptr{0};
    std::vector<std::int32_t> col;
    std::vector<double> val;
    row_ptr.reserve(coords.M + 1);
    for (std::size_t s = 0; s < coords.M; ++s) {
        basis_values(
            idx, m, [&](std::size_t t) { return coords.per_term[t] + s * coords.d; },
            [&](std::size_t c, double v) {
                col.push_back(static_cast<std::int32_t>(c));
                val.push_back(v);
            });
        row_ptr.push_back(val.size());
    }
    return SparseDesignMatrix(coords.M, idx.size(), std::move(row_ptr), std::move(col), std::move(val));
}

SparseDesignMatrix assemble(const std::vector<double>& X, const IndexSet& idx, int m) {
    return assemble(uniform_coordinates(X, static_cast<std::size_t>(idx.dim()), idx), idx, m);
}

MatrixFreeOperator::MatrixFreeOperator(TermCoordinates coords, const IndexSet& idx, int m)
    : coords_(std::move(coords)), idx_(&idx), m_(m) {}

void MatrixFreeOperator::apply(const double* x, double* out) const {
    for (std::size_t s = 0; s < coords_.M; ++s) {
        double acc = 0.0;
        basis_values(
            *idx_, m_, [&](std::size_t t) { return coords_.per_term[t] + s * coords_.d; },
            [&](std::size_t c, double v) { acc += v * x[c]; });
        out[s] = acc;
    }
}

void MatrixFreeOperator::apply_transpose(const double* r, double* out) const {
    std::fill(out, out + idx_->size(), 0.0);
    for (std::size_t s = 0; s < coords_.M; ++s) {
        const double rs = r[s];
        basis_values(
            *idx_, m_, [&](std::size_t t) { return coords_.per_term[t] + s * coords_.d; },
            [&](std::size_t c, double v) { out[c] += v * rs; });
    }
}

}  // namespace hwr
