#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "fpspec/multi_index.hpp"
#include "fpspec/polynomial.hpp"

namespace fpspec {

/// Stored coefficients with magnitude at or below this are dropped.
inline constexpr double kCoeffPruneThreshold = 1e-15;

/// Sparse Hermite coefficients d_alpha of f = sum d_alpha h_alpha, with
/// h_alpha = H_alpha f_inf. Iteration follows the graded basis order.
class CoeffVector {
public:
    using Storage = std::map<MultiIndex, double>;

    explicit CoeffVector(int dim = 1);

    /// f_inf itself: d_0 = 1.
    static CoeffVector equilibrium(int dim);
    /// A single basis function value * h_alpha.
    static CoeffVector basis(const MultiIndex& alpha, double value = 1.0);

    int dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return coeffs_.size(); }
    bool empty() const noexcept { return coeffs_.empty(); }
    /// Largest stored |alpha|, or -1 when empty.
    int max_order() const;

    double operator[](const MultiIndex& alpha) const;
    void set(const MultiIndex& alpha, double value);
    void add(const MultiIndex& alpha, double value);

    Storage::const_iterator begin() const { return coeffs_.begin(); }
    Storage::const_iterator end() const { return coeffs_.end(); }

    /// Coefficients of order m laid out in enumerate_indices(dim, m) order.
    std::vector<double> block(int m) const;
    void set_block(int m, std::span<const double> values);

    /// sum alpha! d_alpha^2 over all stored entries.
    double weighted_norm2() const;
    /// sum alpha! d_alpha^2 restricted to |alpha| = m.
    double weighted_norm2(int m) const;
    /// sum alpha! u_alpha v_alpha.
    double weighted_dot(const CoeffVector& other) const;

    CoeffVector& operator+=(const CoeffVector& o);
    CoeffVector& operator-=(const CoeffVector& o);
    CoeffVector& operator*=(double s);
    friend CoeffVector operator+(CoeffVector a, const CoeffVector& b) { return a += b; }
    friend CoeffVector operator-(CoeffVector a, const CoeffVector& b) { return a -= b; }
    friend CoeffVector operator*(double s, CoeffVector a) { return a *= s; }

private:
    void check(const MultiIndex& alpha) const;
    void check(const CoeffVector& o) const;

    int dim_;
    Storage coeffs_;
};

using ExactCoeffs = std::map<MultiIndex, std::int64_t>;

/// H_alpha with h_alpha = (-1)^{|alpha|} d^alpha f_inf = H_alpha f_inf, obtained by
/// repeatedly applying -d_j(P f_inf) = (x_j P - d_j P) f_inf.
ExactPolynomial hermite_polynomial(const MultiIndex& alpha);

/// Univariate He_n(x) by the three-term recurrence.
double hermite_value(int n, double x);
/// H_alpha(x) = prod_i He_{alpha_i}(x_i).
double hermite_value(const MultiIndex& alpha, std::span<const double> x);

/// Hermite coefficients of P for f = P f_inf. Exact for integer polynomials.
ExactCoeffs expand_exact(const ExactPolynomial& p);
CoeffVector expand(const ExactPolynomial& p);
CoeffVector expand(const RealPolynomial& p);

/// sum d_alpha H_alpha as a polynomial.
ExactPolynomial to_polynomial(const ExactCoeffs& coeffs, int dim);
RealPolynomial to_polynomial(const CoeffVector& f);

/// Coefficients of d_j f + x_j f: entry at alpha is (alpha_j + 1) d_{alpha + e_j}.
CoeffVector gradient_shift(const CoeffVector& f, int j);

/// Standard Gaussian density (2 pi)^{-d/2} exp(-|x|^2 / 2).
double gaussian_density(std::span<const double> x);

/// f(x) = sum d_alpha H_alpha(x) f_inf(x).
double reconstruct(const CoeffVector& f, std::span<const double> x);

} // namespace fpspec
