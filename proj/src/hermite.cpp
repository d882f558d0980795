#include "fpspec/hermite.hpp"

#include <cmath>
#include <numbers>

#include "fpspec/errors.hpp"

namespace fpspec {

CoeffVector::CoeffVector(int dim) : dim_(dim) {
    if (dim < 1) throw InputError("CoeffVector dimension must be >= 1");
}

CoeffVector CoeffVector::equilibrium(int dim) {
    CoeffVector f(dim);
    f.set(MultiIndex::zero(dim), 1.0);
    return f;
}

CoeffVector CoeffVector::basis(const MultiIndex& alpha, double value) {
    CoeffVector f(alpha.dim());
    f.set(alpha, value);
    return f;
}

int CoeffVector::max_order() const {
    return coeffs_.empty() ? -1 : coeffs_.rbegin()->first.order();
}

void CoeffVector::check(const MultiIndex& alpha) const {
    if (alpha.dim() != dim_) throw InputError("multi-index dimension does not match CoeffVector");
}

void CoeffVector::check(const CoeffVector& o) const {
    if (o.dim_ != dim_) throw InputError("CoeffVector dimension mismatch");
}

double CoeffVector::operator[](const MultiIndex& alpha) const {
    check(alpha);
    auto it = coeffs_.find(alpha);
    return it == coeffs_.end() ? 0.0 : it->second;
}

void CoeffVector::set(const MultiIndex& alpha, double value) {
    check(alpha);
    if (!std::isfinite(value)) throw InputError("CoeffVector entries must be finite");
    if (std::abs(value) <= kCoeffPruneThreshold)
        coeffs_.erase(alpha);
    else
        coeffs_[alpha] = value;
}

void CoeffVector::add(const MultiIndex& alpha, double value) { set(alpha, (*this)[alpha] + value); }

std::vector<double> CoeffVector::block(int m) const {
    const auto basis = enumerate_indices(dim_, m);
    std::vector<double> out(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) out[i] = (*this)[basis[i]];
    return out;
}

void CoeffVector::set_block(int m, std::span<const double> values) {
    const auto basis = enumerate_indices(dim_, m);
    if (values.size() != basis.size()) throw InputError("set_block: wrong block length");
    for (std::size_t i = 0; i < basis.size(); ++i) set(basis[i], values[i]);
}

double CoeffVector::weighted_norm2() const {
    double s = 0.0;
    for (const auto& [alpha, v] : coeffs_) s += alpha.factorial() * v * v;
    return s;
}

double CoeffVector::weighted_norm2(int m) const {
    double s = 0.0;
    for (const auto& [alpha, v] : coeffs_)
        if (alpha.order() == m) s += alpha.factorial() * v * v;
    return s;
}

double CoeffVector::weighted_dot(const CoeffVector& other) const {
    check(other);
    double s = 0.0;
    for (const auto& [alpha, v] : coeffs_) {
        auto it = other.coeffs_.find(alpha);
        if (it != other.coeffs_.end()) s += alpha.factorial() * v * it->second;
    }
    return s;
}

CoeffVector& CoeffVector::operator+=(const CoeffVector& o) {
    check(o);
    for (const auto& [alpha, v] : o.coeffs_) add(alpha, v);
    return *this;
}

CoeffVector& CoeffVector::operator-=(const CoeffVector& o) {
    check(o);
    for (const auto& [alpha, v] : o.coeffs_) add(alpha, -v);
    return *this;
}

CoeffVector& CoeffVector::operator*=(double s) {
    Storage scaled;
    for (const auto& [alpha, v] : coeffs_)
        if (std::abs(s * v) > kCoeffPruneThreshold) scaled.emplace(alpha, s * v);
    coeffs_ = std::move(scaled);
    return *this;
}

ExactPolynomial hermite_polynomial(const MultiIndex& alpha) {
    const int d = alpha.dim();
    auto p = ExactPolynomial::constant(d, 1);
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < alpha[j]; ++k) p = p.times_x(j) - p.derivative(j);
    return p;
}

double hermite_value(int n, double x) {
    if (n < 0) throw InputError("hermite_value: negative degree");
    double prev = 1.0;
    if (n == 0) return prev;
    double cur = x;
    for (int k = 1; k < n; ++k) {
        const double next = x * cur - k * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

double hermite_value(const MultiIndex& alpha, std::span<const double> x) {
    if (static_cast<int>(x.size()) != alpha.dim()) throw InputError("hermite_value: dimension mismatch");
    double v = 1.0;
    for (int i = 0; i < alpha.dim(); ++i) v *= hermite_value(alpha[i], x[static_cast<std::size_t>(i)]);
    return v;
}

namespace {

// x^n = sum_j table[n][j] He_j, built from x He_j = He_{j+1} + j He_{j-1}.
const std::vector<std::int64_t>& monomial_in_hermite(int n) {
    static thread_local std::vector<std::vector<std::int64_t>> table{{1}};
    while (static_cast<int>(table.size()) <= n) {
        const auto& last = table.back();
        std::vector<std::int64_t> next(last.size() + 1, 0);
        for (std::size_t j = 0; j < last.size(); ++j) {
            next[j + 1] = detail::checked_add(next[j + 1], last[j]);
            if (j > 0)
                next[j - 1] = detail::checked_add(next[j - 1], detail::checked_mul(static_cast<std::int64_t>(j), last[j]));
        }
        table.push_back(std::move(next));
    }
    return table[static_cast<std::size_t>(n)];
}

template <typename Scalar, typename Sink>
void expand_terms(const Polynomial<Scalar>& p, Sink&& sink) {
    const auto d = static_cast<std::size_t>(p.dim());
    for (const auto& [e, c] : p.terms()) {
        // Tensor product of the univariate expansions of each x_i^{e_i}.
        std::vector<int> idx(d, 0);
        std::vector<const std::vector<std::int64_t>*> rows(d);
        for (std::size_t i = 0; i < d; ++i) rows[i] = &monomial_in_hermite(e[i]);
        while (true) {
            Scalar w = c;
            bool nonzero = true;
            for (std::size_t i = 0; i < d && nonzero; ++i) {
                const auto v = (*rows[i])[static_cast<std::size_t>(idx[i])];
                if (v == 0) nonzero = false;
                else w = detail::checked_mul(w, static_cast<Scalar>(v));
            }
            if (nonzero) sink(MultiIndex(idx), w);
            std::size_t i = 0;
            for (; i < d; ++i) {
                if (++idx[i] <= e[i]) break;
                idx[i] = 0;
            }
            if (i == d) break;
        }
    }
}

} // namespace

ExactCoeffs expand_exact(const ExactPolynomial& p) {
    ExactCoeffs out;
    expand_terms(p, [&](MultiIndex alpha, std::int64_t w) {
        auto [it, inserted] = out.try_emplace(std::move(alpha), w);
        if (!inserted) {
            it->second = detail::checked_add(it->second, w);
            if (it->second == 0) out.erase(it);
        }
    });
    return out;
}

CoeffVector expand(const ExactPolynomial& p) {
    CoeffVector f(p.dim());
    for (const auto& [alpha, v] : expand_exact(p)) f.set(alpha, static_cast<double>(v));
    return f;
}

CoeffVector expand(const RealPolynomial& p) {
    std::map<MultiIndex, double> acc;
    expand_terms(p, [&](MultiIndex alpha, double w) { acc[std::move(alpha)] += w; });
    CoeffVector f(p.dim());
    for (const auto& [alpha, v] : acc) f.set(alpha, v);
    return f;
}

ExactPolynomial to_polynomial(const ExactCoeffs& coeffs, int dim) {
    ExactPolynomial p(dim);
    for (const auto& [alpha, v] : coeffs) p += hermite_polynomial(alpha).scaled(v);
    return p;
}

RealPolynomial to_polynomial(const CoeffVector& f) {
    RealPolynomial p(f.dim());
    for (const auto& [alpha, v] : f) p += hermite_polynomial(alpha).cast<double>().scaled(v);
    return p;
}

CoeffVector gradient_shift(const CoeffVector& f, int j) {
    if (j < 0 || j >= f.dim()) throw InputError("gradient_shift: coordinate out of range");
    CoeffVector out(f.dim());
    for (const auto& [beta, v] : f)
        if (beta[j] >= 1) out.set(beta.minus_unit(j), beta[j] * v);
    return out;
}

double gaussian_density(std::span<const double> x) {
    double r2 = 0.0;
    for (double xi : x) r2 += xi * xi;
    const double d = static_cast<double>(x.size());
    return std::exp(-0.5 * r2 - 0.5 * d * std::log(2.0 * std::numbers::pi));
}

double reconstruct(const CoeffVector& f, std::span<const double> x) {
    if (static_cast<int>(x.size()) != f.dim()) throw InputError("reconstruct: point has wrong dimension");
    double s = 0.0;
    for (const auto& [alpha, v] : f) s += v * hermite_value(alpha, x);
    return s * gaussian_density(x);
}

} // namespace fpspec
