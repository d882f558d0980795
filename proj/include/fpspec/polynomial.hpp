#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <type_traits>
#include <vector>

#include "fpspec/errors.hpp"

namespace fpspec {

namespace detail {

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw SizeError("integer polynomial coefficient overflow");
    return r;
}
inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw SizeError("integer polynomial coefficient overflow");
    return r;
}
inline double checked_add(double a, double b) { return a + b; }
inline double checked_mul(double a, double b) { return a * b; }

} // namespace detail

/// Sparse polynomial in d variables, keyed by exponent vector. With
/// Scalar = int64_t all operations are exact (overflow throws SizeError).
template <typename Scalar>
class Polynomial {
public:
    using Exponent = std::vector<int>;
    using Terms = std::map<Exponent, Scalar>;

    Polynomial() = default;
    explicit Polynomial(int dim) : dim_(dim) {}

    static Polynomial constant(int dim, Scalar c) {
        Polynomial p(dim);
        p.add_term(Exponent(static_cast<std::size_t>(dim), 0), c);
        return p;
    }

    static Polynomial monomial(Exponent e, Scalar c = Scalar{1}) {
        Polynomial p(static_cast<int>(e.size()));
        p.add_term(std::move(e), c);
        return p;
    }

    int dim() const noexcept { return dim_; }
    const Terms& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }

    Scalar coeff(const Exponent& e) const {
        auto it = terms_.find(e);
        return it == terms_.end() ? Scalar{0} : it->second;
    }

    void add_term(Exponent e, Scalar c) {
        if (static_cast<int>(e.size()) != dim_) throw InputError("polynomial term has wrong dimension");
        if (c == Scalar{0}) return;
        auto [it, inserted] = terms_.try_emplace(std::move(e), c);
        if (!inserted) {
            it->second = detail::checked_add(it->second, c);
            if (it->second == Scalar{0}) terms_.erase(it);
        }
    }

    int degree() const {
        int deg = -1;
        for (const auto& [e, c] : terms_) {
            int s = 0;
            for (int k : e) s += k;
            deg = std::max(deg, s);
        }
        return deg;
    }

    Polynomial& operator+=(const Polynomial& o) {
        check_dim(o);
        for (const auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o) {
        check_dim(o);
        for (const auto& [e, c] : o.terms_) add_term(e, detail::checked_mul(Scalar{-1}, c));
        return *this;
    }
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }

    Polynomial scaled(Scalar s) const {
        Polynomial r(dim_);
        for (const auto& [e, c] : terms_) r.add_term(e, detail::checked_mul(s, c));
        return r;
    }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        a.check_dim(b);
        Polynomial r(a.dim_);
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_) {
                Exponent e(ea);
                for (std::size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
                r.add_term(std::move(e), detail::checked_mul(ca, cb));
            }
        return r;
    }

    /// x_i * p
    Polynomial times_x(int i) const {
        Polynomial r(dim_);
        for (const auto& [e, c] : terms_) {
            Exponent f(e);
            ++f.at(static_cast<std::size_t>(i));
            r.add_term(std::move(f), c);
        }
        return r;
    }

    /// d/dx_i p
    Polynomial derivative(int i) const {
        Polynomial r(dim_);
        for (const auto& [e, c] : terms_) {
            const int k = e.at(static_cast<std::size_t>(i));
            if (k == 0) continue;
            Exponent f(e);
            --f[static_cast<std::size_t>(i)];
            r.add_term(std::move(f), detail::checked_mul(static_cast<Scalar>(k), c));
        }
        return r;
    }

    double evaluate(std::span<const double> x) const {
        if (static_cast<int>(x.size()) != dim_) throw InputError("polynomial evaluated at point of wrong dimension");
        double sum = 0.0;
        for (const auto& [e, c] : terms_) {
            double term = static_cast<double>(c);
            for (std::size_t i = 0; i < e.size(); ++i) term *= std::pow(x[i], e[i]);
            sum += term;
        }
        return sum;
    }

    template <typename Other>
    Polynomial<Other> cast() const {
        Polynomial<Other> r(dim_);
        for (const auto& [e, c] : terms_) r.add_term(e, static_cast<Other>(c));
        return r;
    }

    friend bool operator==(const Polynomial& a, const Polynomial& b) {
        return a.dim_ == b.dim_ && a.terms_ == b.terms_;
    }

private:
    void check_dim(const Polynomial& o) const {
        if (o.dim_ != dim_) throw InputError("polynomial dimension mismatch");
    }

    int dim_ = 0;
    Terms terms_;
};

using ExactPolynomial = Polynomial<std::int64_t>;
using RealPolynomial = Polynomial<double>;

} // namespace fpspec
