#include <doctest.h>

#include <numbers>
#include <random>

#include "fpspec/errors.hpp"
#include "fpspec/hermite.hpp"
#include "fpspec/quadrature.hpp"
#include "test_support.hpp"

using namespace fpspec;
using namespace fpspec::testing;

namespace {

ExactPolynomial poly1(std::initializer_list<std::pair<int, std::int64_t>> terms) {
    ExactPolynomial p(1);
    for (auto [e, c] : terms) p.add_term({e}, c);
    return p;
}

std::vector<MultiIndex> indices_up_to(int dim, int max_order) {
    std::vector<MultiIndex> out;
    for (int m = 0; m <= max_order; ++m)
        for (auto& a : enumerate_indices(dim, m)) out.push_back(a);
    return out;
}

} // namespace

TEST_CASE("enumerate_indices uses graded lexicographic order") {
    const auto two = enumerate_indices(2, 2);
    REQUIRE(two.size() == 3);
    CHECK(two[0] == MultiIndex{2, 0});
    CHECK(two[1] == MultiIndex{1, 1});
    CHECK(two[2] == MultiIndex{0, 2});
    CHECK(enumerate_indices(1, 5) == std::vector<MultiIndex>{MultiIndex{5}});
    CHECK(enumerate_indices(3, 2).size() == 6);
    for (int d = 1; d <= 4; ++d)
        for (int m = 0; m <= 6; ++m) {
            const auto idx = enumerate_indices(d, m);
            CHECK(static_cast<std::int64_t>(idx.size()) == block_size(d, m));
            CHECK(std::is_sorted(idx.begin(), idx.end()));
            for (const auto& a : idx) CHECK(a.order() == m);
        }
    CHECK_THROWS_AS(MultiIndex({1, -1}), InputError);
}

TEST_CASE("hermite polynomials from symbolic differentiation") {
    CHECK(hermite_polynomial(MultiIndex{1, 0}) == ExactPolynomial::monomial({1, 0}));
    CHECK(hermite_polynomial(MultiIndex{2}) == poly1({{2, 1}, {0, -1}}));
    CHECK(hermite_polynomial(MultiIndex{3}) == poly1({{3, 1}, {1, -3}}));
    CHECK(hermite_polynomial(MultiIndex{2, 1}).degree() == 3);
    // factorization across coordinates
    const auto h21 = hermite_polynomial(MultiIndex{2, 1});
    ExactPolynomial x2m1(2);
    x2m1.add_term({2, 0}, 1);
    x2m1.add_term({0, 0}, -1);
    CHECK(h21 == x2m1 * ExactPolynomial::monomial({0, 1}));
}

TEST_CASE("recurrence: d_j (H_alpha f_inf) = -H_{alpha+e_j} f_inf") {
    for (int d = 1; d <= 3; ++d)
        for (const auto& alpha : indices_up_to(d, 6)) {
            const auto h = hermite_polynomial(alpha);
            for (int j = 0; j < d; ++j) {
                // d_j (P f_inf) = (d_j P - x_j P) f_inf
                const auto lhs = h.derivative(j) - h.times_x(j);
                CHECK(lhs == hermite_polynomial(alpha.plus_unit(j)).scaled(-1));
            }
        }
}

TEST_CASE("numeric hermite evaluation matches the exact polynomials") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-3, 3);
    for (const auto& alpha : indices_up_to(2, 6)) {
        const std::vector<double> x{u(rng), u(rng)};
        const double exact = hermite_polynomial(alpha).evaluate(x);
        CHECK(hermite_value(alpha, x) == doctest::Approx(exact).epsilon(1e-12));
    }
}

TEST_CASE("inner products and quadrature orthogonality") {
    CHECK(inner_product(MultiIndex{1, 1}, MultiIndex{1, 1}) == 1.0);
    CHECK(inner_product(MultiIndex{2, 0}, MultiIndex{0, 2}) == 0.0);
    CHECK(inner_product(MultiIndex{3, 1}, MultiIndex{3, 1}) == 6.0);

    const auto rule = gauss_hermite(12);
    const auto idx = indices_up_to(2, 5);
    for (const auto& a : idx)
        for (const auto& b : idx) {
            const double q = integrate_standard_normal(rule, 2, [&](std::span<const double> x) {
                return hermite_value(a, x) * hermite_value(b, x);
            });
            CHECK(std::abs(q - inner_product(a, b)) <= 1e-10);
        }
}

TEST_CASE("gauss hermite rule integrates moments exactly") {
    const auto rule = gauss_hermite(20);
    double w = 0.0;
    for (double v : rule.weights) w += v;
    CHECK(w == doctest::Approx(1.0).epsilon(1e-14));
    // E[x^{2k}] = (2k-1)!!
    double dfact = 1.0;
    for (int k = 1; k <= 10; ++k) {
        dfact *= (2 * k - 1);
        double m = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) m += rule.weights[i] * std::pow(rule.nodes[i], 2 * k);
        CHECK(m == doctest::Approx(dfact).epsilon(1e-11));
    }
}

TEST_CASE("expand: monomial to hermite change of basis") {
    const auto h10 = expand(hermite_polynomial(MultiIndex{1, 0}));
    CHECK(h10.size() == 1);
    CHECK(h10[MultiIndex{1, 0}] == 1.0);

    const auto x2 = expand_exact(ExactPolynomial::monomial({2}));
    CHECK(x2.size() == 2);
    CHECK(x2.at(MultiIndex{2}) == 1);
    CHECK(x2.at(MultiIndex{0}) == 1);

    const auto one = expand(ExactPolynomial::constant(2, 1));
    CHECK(one.size() == 1);
    CHECK(one[MultiIndex::zero(2)] == 1.0);
}

TEST_CASE("expand inverts reconstruction as a polynomial (exact)") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> u(-9, 9);
    for (int d = 1; d <= 3; ++d)
        for (int trial = 0; trial < 8; ++trial) {
            ExactCoeffs c;
            for (const auto& a : indices_up_to(d, d == 3 ? 5 : 8))
                if (int v = u(rng); v != 0 && u(rng) > 3) c[a] = v;
            CHECK(expand_exact(to_polynomial(c, d)) == c);
        }
}

TEST_CASE("gradient shift") {
    CHECK(gradient_shift(CoeffVector::equilibrium(2), 0).empty());
    const auto g = gradient_shift(CoeffVector::basis(MultiIndex{2}), 0);
    CHECK(g.size() == 1);
    CHECK(g[MultiIndex{1}] == 2.0);
    CHECK(gradient_shift(CoeffVector::basis(MultiIndex{1, 0}), 1).empty());

    SUBCASE("matches d_j f + x_j f computed on polynomials") {
        std::mt19937_64 rng(9);
        const auto f = random_coeffs(rng, 2, 0, 5);
        const auto p = to_polynomial(f);
        for (int j = 0; j < 2; ++j) {
            // (d_j + x_j)(P f_inf) = (d_j P) f_inf
            const auto expected = expand(p.derivative(j));
            const auto got = gradient_shift(f, j);
            for (const auto& [a, v] : expected) CHECK(got[a] == doctest::Approx(v).epsilon(1e-12));
            for (const auto& [a, v] : got) CHECK(expected[a] == doctest::Approx(v).epsilon(1e-12));
        }
    }
    SUBCASE("linearity") {
        std::mt19937_64 rng(13);
        for (int trial = 0; trial < 20; ++trial) {
            const auto f = random_coeffs(rng, 3, 0, 4), g = random_coeffs(rng, 3, 0, 4);
            const double a = 0.7, b = -1.3;
            for (int j = 0; j < 3; ++j) {
                const auto lhs = gradient_shift(a * f + b * g, j);
                const auto rhs = a * gradient_shift(f, j) + b * gradient_shift(g, j);
                CHECK((lhs - rhs).weighted_norm2() < 1e-24);
            }
        }
    }
}

TEST_CASE("reconstruct") {
    const std::vector<double> origin{0.0, 0.0};
    CHECK(reconstruct(CoeffVector::equilibrium(2), origin) == doctest::Approx(1.0 / (2 * std::numbers::pi)));
    const std::vector<double> x{1.0, 0.0};
    CHECK(reconstruct(CoeffVector::basis(MultiIndex{1, 0}), x) ==
          doctest::Approx(std::exp(-0.5) / (2 * std::numbers::pi)));
    std::mt19937_64 rng(17);
    const auto f = random_coeffs(rng, 2, 0, 6);
    const double norm = std::sqrt(f.weighted_norm2());
    const std::vector<double> far{20.0 / std::sqrt(2.0), -20.0 / std::sqrt(2.0)};
    CHECK(std::abs(reconstruct(f, far)) <= 1e-60 * norm);
}

TEST_CASE("CoeffVector storage") {
    CoeffVector f(2);
    f.set(MultiIndex{1, 0}, 1e-16);
    CHECK(f.empty());
    f.set(MultiIndex{1, 0}, 2.0);
    f.set(MultiIndex{0, 3}, 1.0);
    CHECK(f.max_order() == 3);
    CHECK(f.weighted_norm2() == doctest::Approx(4.0 + 6.0));
    CHECK(f.block(1) == std::vector<double>{2.0, 0.0});
    f.add(MultiIndex{1, 0}, -2.0);
    CHECK(f.size() == 1);
    CHECK_THROWS_AS(f.set(MultiIndex{1, 0, 0}, 1.0), InputError);
}

TEST_CASE("integer overflow in exact polynomials is reported") {
    auto p = ExactPolynomial::constant(1, std::numeric_limits<std::int64_t>::max() / 2);
    CHECK_THROWS_AS(p.scaled(4), SizeError);
}
