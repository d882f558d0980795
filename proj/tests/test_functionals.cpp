#include <doctest.h>

#include <random>

#include "fpspec/errors.hpp"
#include "fpspec/functionals.hpp"
#include "fpspec/quadrature.hpp"
#include "test_support.hpp"

using namespace fpspec;
using namespace fpspec::testing;

namespace {

// int |grad(f / f_inf)|^2 f_inf dx with f = P f_inf, by tensor Gauss-Hermite quadrature.
double fisher_by_quadrature(const CoeffVector& f) {
    const auto p = to_polynomial(f);
    const auto rule = gauss_hermite(12);
    double total = 0.0;
    for (int j = 0; j < f.dim(); ++j) {
        const auto dp = p.derivative(j);
        total += integrate_standard_normal(rule, f.dim(), [&](std::span<const double> x) {
            const double v = dp.evaluate(x);
            return v * v;
        });
    }
    return total;
}

Matrix random_spd(std::mt19937_64& rng, int dim) {
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix a(dim, dim);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = n(rng);
    return a * a.transpose() + 0.1 * Matrix::Identity(dim, dim);
}

} // namespace

TEST_CASE("relative entropy examples") {
    CHECK(entropy_e2(CoeffVector::equilibrium(2)) == 0.0);
    auto f = CoeffVector::equilibrium(2);
    f.set(MultiIndex{1, 0}, 1.0);
    CHECK(entropy_e2(f) == doctest::Approx(0.5));
    f.set(MultiIndex{1, 0}, 0.0);
    f.set(MultiIndex{1, 1}, std::sqrt(2.0));
    CHECK(entropy_e2(f) == doctest::Approx(1.0));
    CHECK(entropy_e2(CoeffVector::basis(MultiIndex{2, 0}), MassConvention::Deviation) == doctest::Approx(1.0));
    CHECK_THROWS_AS(entropy_e2(CoeffVector::basis(MultiIndex{2, 0})), InputError);
    CHECK_THROWS_AS(entropy_e2(CoeffVector::equilibrium(2), MassConvention::Deviation), InputError);
}

TEST_CASE("Fisher information examples") {
    CHECK(fisher_I2(CoeffVector::equilibrium(2)) == 0.0);
    CHECK(fisher_I2(CoeffVector::basis(MultiIndex{1, 0})) == doctest::Approx(1.0));
    CHECK(fisher_I2(CoeffVector::basis(MultiIndex{2, 0})) == doctest::Approx(4.0));
    CHECK(fisher_I2(CoeffVector::basis(MultiIndex{1, 1})) == doctest::Approx(2.0));
}

TEST_CASE("Fisher information: weighted sum, flux form and quadrature agree") {
    std::mt19937_64 rng(51);
    for (int dim = 1; dim <= 3; ++dim)
        for (int trial = 0; trial < 10; ++trial) {
            const auto f = random_coeffs(rng, dim, 0, dim == 3 ? 4 : 6);
            const double a = fisher_I2(f);
            CHECK(fisher_I2_flux(f) == doctest::Approx(a).epsilon(1e-12));
            CHECK(fisher_by_quadrature(f) == doctest::Approx(a).epsilon(1e-10));
            CHECK(fisher_IP(f, Matrix::Identity(dim, dim)) == doctest::Approx(a).epsilon(1e-12));
        }
}

TEST_CASE("Fisher information with a metric") {
    std::mt19937_64 rng(53);
    const auto f = random_coeffs(rng, 2, 0, 4);
    CHECK(fisher_IP(f, 2.0 * Matrix::Identity(2, 2)) == doctest::Approx(2.0 * fisher_I2(f)));
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix p = random_spd(rng, 2);
        const auto g = random_coeffs(rng, 2, 0, 4);
        const auto ev = Eigen::SelfAdjointEigenSolver<Matrix>(p).eigenvalues();
        const double i2 = fisher_I2(g), ip = fisher_IP(g, p);
        CHECK(ip >= ev.minCoeff() * i2 * (1 - 1e-10));
        CHECK(ip <= ev.maxCoeff() * i2 * (1 + 1e-10));
    }
    Matrix bad(2, 2);
    bad << 1, 0, 0, -1;
    CHECK_THROWS_AS(fisher_IP(f, bad), InputError);
    Matrix asym(2, 2);
    asym << 1, 0.5, 0, 1;
    CHECK_THROWS_AS(fisher_IP(f, asym), InputError);
}

TEST_CASE("vanishing moments") {
    auto f = CoeffVector::equilibrium(2);
    f.set(MultiIndex{2, 0}, 1.0);
    CHECK(vanishing_moment_violations(f, 2).empty());
    f.set(MultiIndex{0, 1}, 0.5);
    const auto v = vanishing_moment_violations(f, 2);
    REQUIRE(v.size() == 1);
    CHECK(v[0] == MultiIndex{0, 1});
    CHECK(vanishing_moment_violations(f, 1).empty());
}

TEST_CASE("decay experiment on OU is exact") {
    std::mt19937_64 rng(57);
    const std::vector<double> times{0.0, 0.5, 1.0, 2.0, 3.0};
    for (int m = 1; m <= 3; ++m) {
        const auto f0 = random_coeffs(rng, 2, m, m);
        const auto r = decay_experiment(ou_model(), f0, m, times);
        CHECK(r.mu == doctest::Approx(1.0));
        CHECK(r.defect == 0);
        for (std::size_t k = 0; k < times.size(); ++k) {
            const double exact = r.fisher0 * std::exp(-2.0 * m * times[k]);
            CHECK(r.fisher[k] == doctest::Approx(exact).epsilon(1e-10));
            CHECK(r.bound[k] == doctest::Approx(exact).epsilon(1e-10));
        }
        CHECK_FALSE(r.first_bound_violation());
        CHECK_FALSE(r.first_envelope_violation());
    }
}

TEST_CASE("decay experiment at equilibrium") {
    const auto r = decay_experiment(kinetic_model(), CoeffVector::equilibrium(2), 1, {0.0, 1.0});
    CHECK(r.fisher0 == 0.0);
    CHECK(r.fisher == std::vector<double>{0.0, 0.0});
    CHECK_FALSE(r.first_bound_violation());
}

TEST_CASE("decay experiment on the kinetic model respects the bound") {
    std::mt19937_64 rng(59);
    std::vector<double> times;
    for (int k = 0; k < 41; ++k) times.push_back(0.25 * k);
    for (int m = 1; m <= 3; ++m) {
        const auto f0 = random_coeffs(rng, 2, m, 5);
        SpectralSolver solver(kinetic_model(), 5);
        const auto r = decay_experiment(solver, f0, m, times);
        CHECK(r.mu == doctest::Approx(0.5));
        CHECK(r.fitted_cm >= 1.0);
        CHECK_FALSE(r.first_bound_violation());
        CHECK_FALSE(r.first_envelope_violation());
        CHECK(r.fisher.front() == doctest::Approx(r.fisher0));
    }
}

TEST_CASE("decay experiment rejects data with low moments") {
    auto f0 = CoeffVector::equilibrium(2);
    f0.set(MultiIndex{1, 0}, 1.0);
    f0.set(MultiIndex{2, 0}, 1.0);
    CHECK_THROWS_AS(decay_experiment(kinetic_model(), f0, 2, {0.0, 1.0}), InputError);
}

TEST_CASE("sharpness witness attains the bound") {
    for (const auto& model : {kinetic_model(), defective_model(), chain3_model()})
        for (int m = 1; m <= 3; ++m) {
            const double t_star = 1.0;
            const auto w = sharpness_witness(model, m, t_star);
            CHECK(w.unique);
            CHECK(w.f0[MultiIndex::zero(model.dim())] == 1.0);
            CHECK(vanishing_moment_violations(w.f0, m).empty());
            CHECK(w.direction.norm() == doctest::Approx(1.0));
            const auto r = decay_experiment(model, w.f0, m, {0.0, t_star});
            CHECK(r.fisher[1] / r.bound[1] >= 1 - 1e-6);
            CHECK(r.fisher[1] <= r.bound[1] * (1 + kBoundSlack));
        }
}

TEST_CASE("sharpness witness on an isotropic model is not unique") {
    const auto w = sharpness_witness(ou_model(), 1, 1.0);
    CHECK_FALSE(w.unique);
    const auto r = decay_experiment(ou_model(), w.f0, 1, {0.0, 1.0});
    CHECK(r.fisher[1] / r.bound[1] == doctest::Approx(1.0));
}
