#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "hwr/rational.hpp"

namespace hwr {

// Piecewise polynomial with exact rational coefficients. Piece i lives on
// [knots[i], knots[i+1]] and is stored as sum_l c_l (x - knots[i])^l.
// Zero left of the first knot; equal to right_tail() right of the last one
// (the tail is zero except for antiderivatives of functions with nonzero mass).
class PiecewisePolynomial {
public:
    using Coeffs = std::vector<Rational>;

    PiecewisePolynomial() = default;
    PiecewisePolynomial(std::vector<Rational> knots, std::vector<Coeffs> pieces,
                        Rational right_tail = 0);

    const std::vector<Rational>& knots() const { return knots_; }
    const std::vector<Coeffs>& pieces() const { return pieces_; }
    const Rational& right_tail() const { return tail_; }
    bool empty() const { return pieces_.empty(); }
    int degree() const;
    Rational support_lo() const;
    Rational support_hi() const;

    // Right-continuous inside, left-continuous at the last knot.
    Rational eval_exact(const Rational& x) const;
    double operator()(double x) const;
    // r-th derivative of the piece selected by the same tie rule.
    double derivative_at(double x, int r) const;
    // Value of the piece on the left of x (x is treated as a limit from below).
    Rational left_limit(const Rational& x, int r = 0) const;
    Rational right_limit(const Rational& x, int r = 0) const;

    PiecewisePolynomial derivative() const;
    // F(x) = integral of p over (-inf, x].
    PiecewisePolynomial antiderivative() const;
    Rational integral() const;
    Rational integral(const Rational& a, const Rational& b) const;
    // integral of p(x) x^beta over R
    Rational moment(int beta) const;

    // x -> p(s x - c), s > 0
    PiecewisePolynomial affine(const Rational& s, const Rational& c) const;
    // x -> integral of p over [x - 1/2, x + 1/2]
    PiecewisePolynomial box_smooth() const;

    PiecewisePolynomial operator+(const PiecewisePolynomial& o) const;
    PiecewisePolynomial operator-(const PiecewisePolynomial& o) const;
    PiecewisePolynomial operator*(const PiecewisePolynomial& o) const;
    PiecewisePolynomial scaled(const Rational& s) const;

    // Re-express on a superset of the current knots (must contain all of them).
    PiecewisePolynomial refined(const std::vector<Rational>& knots) const;
    // Drop leading and trailing pieces that are identically zero.
    PiecewisePolynomial trimmed() const;

    const std::vector<double>& knots_double() const { return knots_d_; }
    const std::vector<std::vector<double>>& pieces_double() const { return pieces_d_; }

    nlohmann::json to_json() const;
    static PiecewisePolynomial from_json(const nlohmann::json& j);

private:
    std::ptrdiff_t locate(const Rational& x) const;
    std::ptrdiff_t locate(double x) const;
    void build_cache();

    std::vector<Rational> knots_;
    std::vector<Coeffs> pieces_;
    Rational tail_ = 0;
    std::vector<double> knots_d_;
    std::vector<std::vector<double>> pieces_d_;
    double tail_d_ = 0.0;
};

// Helpers on single local polynomials
namespace poly {
Rational eval(const PiecewisePolynomial::Coeffs& c, const Rational& t);
// Re-anchor: given coefficients about a, return coefficients about a + delta.
PiecewisePolynomial::Coeffs shift(const PiecewisePolynomial::Coeffs& c, const Rational& delta);
PiecewisePolynomial::Coeffs multiply(const PiecewisePolynomial::Coeffs& a,
                                     const PiecewisePolynomial::Coeffs& b);
}  // namespace poly

}  // namespace hwr
